#pragma once
// Balanced colorings (equitable partitions): minimum balanced coloring by
// iterative refinement, equitability checking with a witness, indicator
// and quotient matrices.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "clustersync/network.hpp"

namespace clustersync {

// Node partition into clusters. Nontrivial clusters (size >= 2) come
// first, each group ordered by its smallest contained node index.
struct Partition {
    std::vector<int> cluster_of;    // node -> cluster index in [0, K)
    std::vector<int> sizes;         // n_k per cluster
    int K = 0;                      // total clusters
    int K_nontrivial = 0;           // clusters with n_k >= 2, ordered first

    int n_nodes() const { return static_cast<int>(cluster_of.size()); }
    std::vector<std::vector<int>> members() const;  // per-cluster node lists (ascending)
};

// 0/1 indicator matrix Z (N x K) with pseudo-inverse Z+ = (Z^T Z)^-1 Z^T,
// exact because Z^T Z = diag(n_1..n_K).
struct IndicatorMatrix {
    Eigen::MatrixXd Z;

    static IndicatorMatrix from_partition(const Partition& p);
    Eigen::MatrixXd pseudo_inverse() const;  // K x N
};

// Row-sum equality tolerance used throughout: eps_eq = 1e-9 * max|A~|.
double equitable_tolerance(const DenseSymMatrix& At);

// Witness for a failed equitability check: nodes i, j in the same cluster
// whose coupling sums into cluster ell differ.
struct EquitabilityWitness {
    int i = -1;
    int j = -1;
    int ell = -1;
    double sum_i = 0.0;
    double sum_j = 0.0;
};

// Checks Def.-style equitability: for every cluster pair (k, ell) and all
// i, j in C_k, sum_{h in C_ell} At_ih == sum_{h in C_ell} At_jh within
// eps_eq. Returns a witness for the first violation found.
bool is_equitable(const DenseSymMatrix& At, const Partition& p,
                  EquitabilityWitness* witness = nullptr);

// Minimum balanced coloring via iterative color refinement: start from a
// single color and repeatedly split colors by the vector of weighted
// color-degree sums until stable. Deterministic ordering. The diagonal
// shift never affects the result (it is constant within a cluster), so
// callers may pass A or A~ interchangeably.
Partition minimum_balanced_coloring(const DenseSymMatrix& At);

// Re-labels an arbitrary cluster assignment (values need not be compact)
// into canonical Partition form: nontrivial clusters first, then by
// smallest node index.
Partition canonicalize_partition(const std::vector<int>& cluster_of);

// Quotient matrix: row k holds sum_{h in C_ell} At_ih for a representative
// i in C_k (equal for all representatives by equitability; verified within
// eps_eq, throws std::invalid_argument otherwise). Equals Z+ A~ Z.
Eigen::MatrixXd quotient_matrix(const DenseSymMatrix& At, const Partition& p);

}  // namespace clustersync
