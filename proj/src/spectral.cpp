#include "clustersync/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace clustersync {

EigSym eig_sym(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument("eig_sym: matrix is not square");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eig_sym: iteration cap reached without convergence");
    }
    return EigSym{es.eigenvalues(), es.eigenvectors()};
}

EigSym eig_sym(const DenseSymMatrix& M) { return eig_sym(M.mat()); }

std::vector<Eigen::VectorXd> cluster_transverse_basis(const Partition& p, int cluster) {
    if (cluster < 0 || cluster >= p.K) {
        throw std::invalid_argument("cluster_transverse_basis: cluster index out of range");
    }
    const auto nodes = p.members()[cluster];
    const int n = static_cast<int>(nodes.size());
    if (n < 2) {
        throw std::invalid_argument("cluster_transverse_basis: trivial cluster " +
                                    std::to_string(cluster) + " has no transverse directions");
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(n - 1);
    for (int r = 1; r < n; ++r) {
        // Helmert vector: equal weight on the first r members, balancing
        // weight on member r; orthonormal and zero-sum by construction.
        Eigen::VectorXd v = Eigen::VectorXd::Zero(p.n_nodes());
        const double denom = std::sqrt(static_cast<double>(r) * (r + 1.0));
        for (int t = 0; t < r; ++t) v[nodes[t]] = 1.0 / denom;
        v[nodes[r]] = -static_cast<double>(r) / denom;
        out.push_back(std::move(v));
    }
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

bool SpectralDecomposition::fully_separated() const {
    for (const auto& b : blocks) {
        if (b.R.rows() != 1 || b.support.size() != 1) return false;
    }
    return true;
}

SpectralDecomposition decompose(const DenseSymMatrix& At, const Partition& p,
                                std::uint64_t seed) {
    const int N = At.order();
    if (p.n_nodes() != N) {
        throw std::invalid_argument("decompose: partition/matrix size mismatch");
    }
    const int K = p.K;
    if (K <= 1 || K >= N) {
        throw std::invalid_argument("decompose: requires 1 < K < N (got K=" + std::to_string(K) +
                                    ", N=" + std::to_string(N) + ")");
    }
    const int nt = N - K;  // transverse dimension

    // Recover the diagonal shift when the diagonal is constant, so that the
    // rotation is computed from the unshifted adjacency and T is exactly
    // kappa-independent.
    double kappa = -At(0, 0);
    for (int i = 1; i < N; ++i) {
        if (At(i, i) != At(0, 0)) {
            kappa = 0.0;
            break;
        }
    }

    // Row ranges of the per-cluster transverse bases inside U.
    const auto groups = p.members();
    Eigen::MatrixXd U(nt, N);
    std::vector<int> row_cluster(nt);  // owning cluster of each U row
    {
        int row = 0;
        for (int k = 0; k < K; ++k) {
            if (groups[k].size() < 2) continue;
            for (const auto& v : cluster_transverse_basis(p, k)) {
                U.row(row) = v.transpose();
                row_cluster[row] = k;
                ++row;
            }
        }
        if (row != nt) {
            throw std::logic_error("decompose: transverse dimension mismatch");
        }
    }

    // Normalized indicator rows (quotient part of T).
    Eigen::MatrixXd Tq = Eigen::MatrixXd::Zero(K, N);
    for (int k = 0; k < K; ++k) {
        const double inv = 1.0 / std::sqrt(static_cast<double>(groups[k].size()));
        for (int node : groups[k]) Tq(k, node) = inv;
    }

    // Transverse restriction of the unshifted adjacency; the family's other
    // members, the projected indicator matrices E_k, are exactly diagonal
    // 0/1 in this basis (each U row lives inside one cluster).
    const Eigen::MatrixXd A_unshifted =
        At.mat() + kappa * Eigen::MatrixXd::Identity(N, N);
    const Eigen::MatrixXd M0 = U * A_unshifted * U.transpose();

    // Random symmetric combination of the family; its eigenbasis is a
    // common block-diagonalizer with probability one.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(0.5, 1.5);
    Eigen::MatrixXd C = coef(rng) * M0;
    for (int k = 0; k < K; ++k) {
        if (groups[k].size() < 2) continue;
        const double ck = coef(rng);
        for (int r = 0; r < nt; ++r) {
            if (row_cluster[r] == k) C(r, r) += ck;
        }
    }
    const EigSym ce = eig_sym(Eigen::MatrixXd((C + C.transpose()) / 2.0));
    const Eigen::MatrixXd& W = ce.vectors;  // columns

    // Transformed family and the shared nonzero pattern.
    const double thresh = 1e-9 * std::max(At.max_abs(), 1e-300);
    const Eigen::MatrixXd G0 = W.transpose() * M0 * W;
    std::vector<Eigen::MatrixXd> Gk;  // transformed projectors, per cluster
    Gk.reserve(K);
    for (int k = 0; k < K; ++k) {
        if (groups[k].size() < 2) {
            Gk.emplace_back();  // trivial cluster: no transverse rows
            continue;
        }
        Eigen::MatrixXd Wk = Eigen::MatrixXd::Zero(nt, nt);
        for (int r = 0; r < nt; ++r) {
            if (row_cluster[r] == k) Wk += W.row(r).transpose() * W.row(r);
        }
        Gk.push_back(std::move(Wk));
    }
    UnionFind uf(nt);
    for (int i = 0; i < nt; ++i) {
        for (int j = i + 1; j < nt; ++j) {
            bool linked = std::abs(G0(i, j)) > thresh;
            for (int k = 0; !linked && k < K; ++k) {
                if (!Gk[k].size()) continue;
                linked = std::abs(Gk[k](i, j)) > thresh;
            }
            if (linked) uf.unite(i, j);
        }
    }

    // Blocks in order of their smallest transformed index.
    std::vector<std::vector<int>> comps;
    {
        std::vector<int> comp_of(nt, -1);
        for (int i = 0; i < nt; ++i) {
            const int root = uf.find(i);
            int& c = comp_of[root];
            if (c < 0) {
                c = static_cast<int>(comps.size());
                comps.emplace_back();
            }
            comps[c].push_back(i);
        }
    }

    // Permuted transverse rotation: blocks contiguous, final transverse
    // rows are (W^T U) reordered.
    Eigen::MatrixXd Ut(nt, N);
    const Eigen::MatrixXd WU = W.transpose() * U;
    std::vector<TransverseBlock> blocks;
    blocks.reserve(comps.size());
    {
        int out_row = 0;
        for (const auto& comp : comps) {
            TransverseBlock blk;
            const int d = static_cast<int>(comp.size());
            blk.R.resize(d, d);
            for (int a = 0; a < d; ++a) {
                Ut.row(out_row + a) = WU.row(comp[a]);
                for (int b = 0; b < d; ++b) {
                    blk.R(a, b) = G0(comp[a], comp[b]);
                }
            }
            // Shift the block to report eigenvalues of A~ itself.
            blk.R.diagonal().array() -= kappa;
            blk.R = ((blk.R + blk.R.transpose()) / 2.0).eval();
            for (int a = 0; a < d; ++a) blk.rows.push_back(out_row + a);
            for (int k = 0; k < K; ++k) {
                if (!Gk[k].size()) continue;
                double weight = 0.0;
                for (int a = 0; a < d; ++a) weight += Gk[k](comp[a], comp[a]);
                if (weight > thresh) blk.support.push_back(k);
            }
            const EigSym be = eig_sym(blk.R);
            blk.eigenvalues.assign(be.values.data(), be.values.data() + d);
            out_row += d;
            blocks.push_back(std::move(blk));
        }
    }

    SpectralDecomposition dec;
    dec.partition = p;
    dec.kappa = kappa;
    dec.T.resize(N, N);
    dec.T.topRows(K) = Tq;
    dec.T.bottomRows(nt) = Ut;
    dec.Q = Tq * At.mat() * Tq.transpose();
    dec.Qdyn = quotient_matrix(At, p);  // also validates equitability
    {
        const EigSym qe = eig_sym(dec.Q);
        dec.lambda_Q.assign(qe.values.data(), qe.values.data() + K);
    }
    dec.blocks = std::move(blocks);
    dec.lambda_R.assign(K, {});
    for (const auto& blk : dec.blocks) {
        if (blk.support.size() == 1) {
            auto& lst = dec.lambda_R[blk.support.front()];
            lst.insert(lst.end(), blk.eigenvalues.begin(), blk.eigenvalues.end());
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    dec.mu.assign(K, {});
    dec.mu_min.assign(K, nan);
    dec.mu_max.assign(K, nan);
    for (int k = 0; k < K; ++k) {
        auto& lst = dec.lambda_R[k];
        std::sort(lst.begin(), lst.end());
        if (lst.empty()) continue;
        auto& m = dec.mu[k];
        m.resize(lst.size());
        for (std::size_t i = 0; i < lst.size(); ++i) m[i] = -lst[lst.size() - 1 - i];
        dec.mu_min[k] = m.front();
        dec.mu_max[k] = m.back();
    }
    return dec;
}

std::vector<std::vector<int>> detect_intertwined(const SpectralDecomposition& d) {
    std::vector<std::vector<int>> out;
    for (const auto& blk : d.blocks) {
        if (blk.support.size() < 2) continue;
        if (std::find(out.begin(), out.end(), blk.support) == out.end()) {
            out.push_back(blk.support);
        }
    }
    return out;
}

CompleteSyncIndices complete_sync_indices(const DenseSymMatrix& L) {
    const int n = L.order();
    if (n < 2) {
        throw std::invalid_argument("complete_sync_indices: need at least 2 nodes");
    }
    const double scale = std::max(L.max_abs(), 1e-300);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += L(i, j);
        if (std::abs(row) > 1e-8 * scale) {
            throw std::invalid_argument("complete_sync_indices: matrix is not a Laplacian (row " +
                                        std::to_string(i) + " sums to " + std::to_string(row) +
                                        ")");
        }
    }
    const EigSym e = eig_sym(L);
    const double lambda2 = e.values[1];
    const double lambdaN = e.values[n - 1];
    if (std::abs(lambda2) <= 1e-10 * scale) {
        throw std::invalid_argument(
            "complete_sync_indices: graph is disconnected (lambda_2 = 0), alpha_u = 0 signals no "
            "synchronizability");
    }
    CompleteSyncIndices out;
    out.lambda2 = lambda2;
    out.lambdaN = lambdaN;
    out.alpha_b = lambda2 / lambdaN;
    out.alpha_u = lambda2;
    return out;
}

double suggest_kappa(const DenseSymMatrix& A, const Partition& p, double target_mu_min,
                     std::uint64_t seed) {
    (void)seed;  // rotation-free computation; kept for interface stability
    if (!(target_mu_min > 0.0)) {
        throw std::invalid_argument("suggest_kappa: target_mu_min must be positive");
    }
    if (p.n_nodes() != A.order()) {
        throw std::invalid_argument("suggest_kappa: partition/matrix size mismatch");
    }
    if (p.K_nontrivial == 0) {
        throw std::invalid_argument("suggest_kappa: no transverse directions (all clusters trivial)");
    }
    int nt = 0;
    for (int s : p.sizes) nt += std::max(0, s - 1);
    Eigen::MatrixXd U(nt, A.order());
    int row = 0;
    for (int k = 0; k < p.K; ++k) {
        if (p.sizes[k] < 2) continue;
        for (const auto& v : cluster_transverse_basis(p, k)) {
            U.row(row++) = v.transpose();
        }
    }
    const EigSym e = eig_sym(Eigen::MatrixXd(U * A.mat() * U.transpose()));
    return e.values[nt - 1] + target_mu_min;
}

}  // namespace clustersync
