#pragma once
// Spectral machinery: symmetric eigensolves, the orthogonal transform
// separating quotient and transverse dynamics, finest simultaneous block
// diagonalization of the transverse part, per-cluster transverse spectra,
// intertwined-cluster detection, and complete-synchronization indices.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "clustersync/network.hpp"
#include "clustersync/partition.hpp"

namespace clustersync {

struct EigSym {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns match values
};

// Dense symmetric eigendecomposition (ascending eigenvalues, orthonormal
// eigenvectors). Throws std::runtime_error on non-convergence.
EigSym eig_sym(const DenseSymMatrix& M);
EigSym eig_sym(const Eigen::MatrixXd& M);

// Per-cluster orthonormal zero-sum basis: for a cluster of size n, n-1
// vectors supported on the cluster, each orthogonal to the within-cluster
// constant vector (Helmert construction). Throws for trivial clusters.
std::vector<Eigen::VectorXd> cluster_transverse_basis(const Partition& p,
                                                      int cluster);

// One transverse block R_l of the finest decomposition together with the
// clusters whose transverse directions it mixes.
struct TransverseBlock {
    Eigen::MatrixXd R;                 // d_l x d_l symmetric
    std::vector<int> support;          // cluster indices mixed by the block
    std::vector<int> rows;             // row indices into the transverse part of T
    std::vector<double> eigenvalues;   // ascending eigenvalues of R
};

struct SpectralDecomposition {
    Eigen::MatrixXd T;                  // N x N orthogonal; first K rows are
                                        // normalized indicators, the rest the
                                        // rotated transverse basis
    Eigen::MatrixXd Q;                  // K x K quotient block of T A~ T^T
    Eigen::MatrixXd Qdyn;               // row-sum quotient Z+ A~ Z (drives the
                                        // quotient dynamics; same spectrum as Q)
    std::vector<TransverseBlock> blocks;
    std::vector<double> lambda_Q;                  // ascending
    std::vector<std::vector<double>> lambda_R;     // per cluster, ascending;
                                                   // empty for trivial clusters and
                                                   // for clusters only in shared blocks
    std::vector<std::vector<double>> mu;           // mu = -lambda per cluster, ascending
    std::vector<double> mu_min, mu_max;            // per cluster (NaN when undefined)
    Partition partition;
    double kappa = 0.0;

    // Each transverse eigenvalue assigned to exactly one cluster?
    bool fully_separated() const;
};

// Builds the orthogonal transform and finest transverse block structure.
// The rotation is computed from the unshifted adjacency (the shift moves
// all eigenvalues by -kappa but leaves eigenvectors, blocks, and T
// unchanged), then eigenvalues are reported for A~ itself.
//
// Finest blocks: simultaneous block diagonalization via the
// eigendecomposition of one random symmetric linear combination of the
// commutant-generating family (the transverse restriction of A~ and the
// per-cluster projectors), followed by a connectivity scan of the
// transformed family's nonzero pattern at threshold 1e-9 * ||A~||.
// `seed` fixes the random combination for reproducible block reports.
// Requires 1 < K < N; throws std::invalid_argument otherwise.
SpectralDecomposition decompose(const DenseSymMatrix& At, const Partition& p,
                                std::uint64_t seed = 12345);

// Cluster-index sets sharing a transverse block; empty iff every block is
// supported on exactly one cluster. Independent of kappa.
std::vector<std::vector<int>> detect_intertwined(const SpectralDecomposition& d);

struct CompleteSyncIndices {
    double alpha_b = 0.0;  // lambda_2 / lambda_N
    double alpha_u = 0.0;  // lambda_2
    double lambda2 = 0.0;
    double lambdaN = 0.0;
};

// Complete-synchronization indices from the Laplacian spectrum. Throws
// std::invalid_argument for disconnected graphs (lambda_2 ~ 0), since
// alpha_u = 0 signals no synchronizability.
CompleteSyncIndices complete_sync_indices(const DenseSymMatrix& L);

// Smallest shift enforcing mu_i >= target_mu_min for all transverse
// eigenvalues: kappa = (largest transverse eigenvalue of A under p)
// + target_mu_min.
double suggest_kappa(const DenseSymMatrix& A, const Partition& p,
                     double target_mu_min, std::uint64_t seed = 12345);

}  // namespace clustersync
