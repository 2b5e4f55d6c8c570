#include "clustersync/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace clustersync {

std::vector<std::vector<int>> Partition::members() const {
    std::vector<std::vector<int>> out(K);
    for (int node = 0; node < n_nodes(); ++node) {
        out[cluster_of[node]].push_back(node);
    }
    return out;  // ascending by construction
}

IndicatorMatrix IndicatorMatrix::from_partition(const Partition& p) {
    IndicatorMatrix ind;
    ind.Z = Eigen::MatrixXd::Zero(p.n_nodes(), p.K);
    for (int node = 0; node < p.n_nodes(); ++node) {
        ind.Z(node, p.cluster_of[node]) = 1.0;
    }
    return ind;
}

Eigen::MatrixXd IndicatorMatrix::pseudo_inverse() const {
    // (Z^T Z)^-1 Z^T with Z^T Z = diag(n_k): scale each transposed row.
    Eigen::MatrixXd Zt = Z.transpose();
    for (int k = 0; k < Zt.rows(); ++k) {
        double nk = Z.col(k).sum();
        if (nk <= 0.0) {
            throw std::invalid_argument("indicator matrix has an empty cluster");
        }
        Zt.row(k) /= nk;
    }
    return Zt;
}

double equitable_tolerance(const DenseSymMatrix& At) { return 1e-9 * At.max_abs(); }

namespace {

void check_partition_shape(const DenseSymMatrix& At, const Partition& p) {
    if (p.n_nodes() != At.order()) {
        throw std::invalid_argument("partition covers " + std::to_string(p.n_nodes()) +
                                    " nodes but matrix has order " + std::to_string(At.order()));
    }
    if (p.K <= 0) {
        throw std::invalid_argument("partition has no clusters");
    }
    for (int node = 0; node < p.n_nodes(); ++node) {
        if (p.cluster_of[node] < 0 || p.cluster_of[node] >= p.K) {
            throw std::invalid_argument("cluster index out of range at node " +
                                        std::to_string(node));
        }
    }
}

// Sum of At row i over the members of each cluster.
Eigen::VectorXd cluster_row_sums(const DenseSymMatrix& At, const Partition& p, int i) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(p.K);
    for (int h = 0; h < At.order(); ++h) {
        sums[p.cluster_of[h]] += At(i, h);
    }
    return sums;
}

}  // namespace

bool is_equitable(const DenseSymMatrix& At, const Partition& p, EquitabilityWitness* witness) {
    check_partition_shape(At, p);
    const double eps = equitable_tolerance(At);
    const auto groups = p.members();
    for (const auto& group : groups) {
        if (group.size() < 2) continue;
        const int ref = group.front();
        const Eigen::VectorXd ref_sums = cluster_row_sums(At, p, ref);
        for (std::size_t m = 1; m < group.size(); ++m) {
            const int j = group[m];
            const Eigen::VectorXd j_sums = cluster_row_sums(At, p, j);
            for (int ell = 0; ell < p.K; ++ell) {
                if (std::abs(ref_sums[ell] - j_sums[ell]) > eps) {
                    if (witness) {
                        witness->i = ref;
                        witness->j = j;
                        witness->ell = ell;
                        witness->sum_i = ref_sums[ell];
                        witness->sum_j = j_sums[ell];
                    }
                    return false;
                }
            }
        }
    }
    return true;
}

Partition canonicalize_partition(const std::vector<int>& cluster_of) {
    const int n = static_cast<int>(cluster_of.size());
    if (n == 0) {
        throw std::invalid_argument("empty partition");
    }
    // Group nodes by raw label (labels need not be compact).
    struct Group {
        int first_node;
        std::vector<int> nodes;
    };
    std::vector<Group> groups;
    std::vector<std::pair<int, int>> label_to_group;  // (raw label, group idx)
    for (int node = 0; node < n; ++node) {
        int label = cluster_of[node];
        auto it = std::find_if(label_to_group.begin(), label_to_group.end(),
                               [label](const auto& pr) { return pr.first == label; });
        if (it == label_to_group.end()) {
            label_to_group.emplace_back(label, static_cast<int>(groups.size()));
            groups.push_back(Group{node, {node}});
        } else {
            groups[it->second].nodes.push_back(node);
        }
    }
    // Nontrivial clusters first; within each class, by smallest node index.
    std::vector<int> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const bool nta = groups[a].nodes.size() >= 2;
        const bool ntb = groups[b].nodes.size() >= 2;
        if (nta != ntb) return nta;
        return groups[a].first_node < groups[b].first_node;
    });
    Partition p;
    p.cluster_of.assign(n, -1);
    p.K = static_cast<int>(groups.size());
    p.sizes.resize(p.K);
    p.K_nontrivial = 0;
    for (int newk = 0; newk < p.K; ++newk) {
        const Group& g = groups[order[newk]];
        p.sizes[newk] = static_cast<int>(g.nodes.size());
        if (g.nodes.size() >= 2) ++p.K_nontrivial;
        for (int node : g.nodes) p.cluster_of[node] = newk;
    }
    return p;
}

Partition minimum_balanced_coloring(const DenseSymMatrix& At) {
    const int n = At.order();
    if (n <= 0) {
        throw std::invalid_argument("empty matrix");
    }
    const double eps = equitable_tolerance(At);
    std::vector<int> color(n, 0);
    int n_colors = 1;
    // Iterative refinement from a single color: split every color class by
    // the vector of per-color coupling sums until the count stabilizes.
    for (int pass = 0; pass < n + 1; ++pass) {
        // Signatures under the current coloring.
        std::vector<Eigen::VectorXd> sig(n, Eigen::VectorXd::Zero(n_colors));
        for (int i = 0; i < n; ++i) {
            for (int h = 0; h < n; ++h) {
                sig[i][color[h]] += At(i, h);
            }
        }
        // Within each color class, group nodes whose signatures agree
        // within eps. Sorting makes the grouping deterministic.
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (color[a] != color[b]) return color[a] < color[b];
            for (int c = 0; c < n_colors; ++c) {
                const double da = sig[a][c], db = sig[b][c];
                if (std::abs(da - db) > eps) return da < db;
            }
            return a < b;
        });
        std::vector<int> next(n, -1);
        int next_colors = 0;
        for (int idx = 0; idx < n; ++idx) {
            const int node = order[idx];
            if (idx > 0) {
                const int prev = order[idx - 1];
                bool same = color[prev] == color[node];
                if (same) {
                    for (int c = 0; c < n_colors && same; ++c) {
                        if (std::abs(sig[prev][c] - sig[node][c]) > eps) same = false;
                    }
                }
                if (!same) ++next_colors;
            }
            next[node] = next_colors;
        }
        ++next_colors;
        if (next_colors == n_colors && next == color) break;
        const bool stable = next_colors == n_colors;
        color = std::move(next);
        n_colors = next_colors;
        if (stable) break;  // same class count, relabeled only
    }
    return canonicalize_partition(color);
}

Eigen::MatrixXd quotient_matrix(const DenseSymMatrix& At, const Partition& p) {
    EquitabilityWitness w;
    if (!is_equitable(At, p, &w)) {
        throw std::invalid_argument(
            "quotient_matrix: partition is not equitable (nodes " + std::to_string(w.i) + " and " +
            std::to_string(w.j) + " disagree on cluster " + std::to_string(w.ell) + ": " +
            std::to_string(w.sum_i) + " vs " + std::to_string(w.sum_j) + ")");
    }
    const IndicatorMatrix ind = IndicatorMatrix::from_partition(p);
    return ind.pseudo_inverse() * At.mat() * ind.Z;
}

}  // namespace clustersync
