#pragma once
// Network loading, validation, and matrix construction: the weighted
// undirected graph together with its shifted adjacency A - kappa*I and
// graph Laplacian L = D - A.

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace clustersync {

// Thin wrapper around a dense symmetric matrix. Construction enforces
// exact symmetry (entries are stored once and mirrored bit-for-bit).
class DenseSymMatrix {
public:
    DenseSymMatrix() = default;
    explicit DenseSymMatrix(int order) : m_(Eigen::MatrixXd::Zero(order, order)) {}

    // Symmetrizes by copying the lower triangle onto the upper one;
    // throws if the two triangles disagree beyond `tol`.
    static DenseSymMatrix from_dense(const Eigen::MatrixXd& m, double tol = 0.0);

    int order() const { return static_cast<int>(m_.rows()); }
    double operator()(int i, int j) const { return m_(i, j); }
    void set(int i, int j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }
    const Eigen::MatrixXd& mat() const { return m_; }
    double max_abs() const { return m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0; }

private:
    Eigen::MatrixXd m_;
};

struct Edge {
    int i = 0;      // canonical: i < j
    int j = 0;
    double w = 1.0;
};

// Weighted undirected graph plus the diagonal shift kappa.
// Immutable after construction; safe to share across threads.
struct Network {
    int n_nodes = 0;
    std::vector<Edge> edges;          // canonicalized, i < j, no duplicates
    double kappa = 0.0;
    std::vector<std::string> node_labels;  // optional; empty or size n_nodes

    int edge_count() const { return static_cast<int>(edges.size()); }
};

enum class EdgeListFormat { PlainEdgeList, MatrixMarket };

struct NetworkIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Builds a canonicalized Network from (possibly duplicated) raw edges.
// Duplicates with equal weights merge silently; conflicting weights and
// self-loops are errors.
Network make_network(int n_nodes, const std::vector<Edge>& raw_edges,
                     double kappa = 0.0);

// Parses a plain whitespace edge list ("i j [w]", '#' comments) or a
// Matrix Market coordinate file (real or pattern, symmetric or general
// with symmetric content). Plain lists honor `one_based`; Matrix Market
// indices are 1-based per that format's convention.
Network load_edge_list(const std::string& path, EdgeListFormat format,
                       bool one_based = true, double kappa = 0.0);

// Writes the network as a plain edge list (1-based, canonical order).
void save_edge_list(const Network& net, const std::string& path);

// A~ = A - kappa*I. Diagonal entries are exactly -kappa.
DenseSymMatrix shifted_adjacency(const Network& net);

// Unshifted adjacency A (kappa ignored).
DenseSymMatrix adjacency(const Network& net);

// L = D - A with D_ii = sum_j A_ij accumulated in ascending j order, so
// that each row sum, evaluated as L_ii + sum_{j != i} L_ij with the same
// ordering, is exactly zero in IEEE arithmetic (negation is exact).
DenseSymMatrix laplacian(const Network& net);

}  // namespace clustersync
