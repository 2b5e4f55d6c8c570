// Python bindings for the cluster-synchronization library. Matrices cross
// the boundary as numpy arrays; dynamics knobs are keyword arguments with
// the library's defaults.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "clustersync/classify.hpp"
#include "clustersync/config.hpp"
#include "clustersync/dynamics.hpp"
#include "clustersync/examples.hpp"
#include "clustersync/network.hpp"
#include "clustersync/partition.hpp"
#include "clustersync/spectral.hpp"

namespace py = pybind11;
namespace cs = clustersync;

namespace {

cs::DenseSymMatrix as_sym(const Eigen::MatrixXd& m, double tol) {
    return cs::DenseSymMatrix::from_dense(m, tol);
}

cs::EdgeListFormat parse_format(const std::string& f) {
    if (f == "plain") return cs::EdgeListFormat::PlainEdgeList;
    if (f == "matrix-market") return cs::EdgeListFormat::MatrixMarket;
    throw std::invalid_argument("format must be 'plain' or 'matrix-market'");
}

struct ProfileKnobs {
    double dt = 1e-3;
    double settle = 100.0;
    double mle_transient = 100.0;
    double mle_horizon = 400.0;
    double eps_conv = 5e-3;
    double refine_tol = 1e-3;
    double unbounded_margin = 0.05;
    double horizon = 500.0;
    double window_lo = 450.0;
    double window_hi = 500.0;
    double delta = 1e-4;
    double sync_threshold_scale = 1e-3;
    std::uint64_t seed = 12345;

    cs::DynamicsParams params() const {
        cs::DynamicsParams p;
        p.integ.dt = dt;
        p.chain.settle = settle;
        p.chain.seed = seed;
        p.mle.transient = mle_transient;
        p.mle.horizon = mle_horizon;
        p.mle.eps_conv = eps_conv;
        p.interval.refine_tol = refine_tol;
        p.interval.unbounded_margin = unbounded_margin;
        p.sim.horizon = horizon;
        p.sim.window_lo = window_lo;
        p.sim.window_hi = window_hi;
        p.sim.delta = delta;
        p.sim.sync_threshold_scale = sync_threshold_scale;
        p.sim.seed = seed;
        return p;
    }
};

}  // namespace

PYBIND11_MODULE(clustersync, mod) {
    mod.doc() =
        "Cluster synchronization analysis: balanced colorings, the orthogonal "
        "quotient/transverse transform, per-cluster transverse spectra, stable "
        "coupling intervals, and interval classification.";
    mod.attr("__version__") = cs::library_version();

    py::register_exception<cs::NetworkIoError>(mod, "NetworkIoError", PyExc_ValueError);
    py::register_exception<cs::Divergence>(mod, "Divergence", PyExc_RuntimeError);

    py::class_<cs::Edge>(mod, "Edge")
        .def(py::init([](int i, int j, double w) {
                 return cs::Edge{i, j, w};
             }),
             py::arg("i"), py::arg("j"), py::arg("w") = 1.0)
        .def_readonly("i", &cs::Edge::i)
        .def_readonly("j", &cs::Edge::j)
        .def_readonly("w", &cs::Edge::w)
        .def("__repr__", [](const cs::Edge& e) {
            return "Edge(" + std::to_string(e.i) + ", " + std::to_string(e.j) + ", " +
                   std::to_string(e.w) + ")";
        });

    py::class_<cs::Network>(mod, "Network")
        .def_readonly("n_nodes", &cs::Network::n_nodes)
        .def_readonly("edges", &cs::Network::edges)
        .def_readonly("kappa", &cs::Network::kappa)
        .def_property_readonly("edge_count", &cs::Network::edge_count)
        .def("__repr__", [](const cs::Network& n) {
            return "Network(n_nodes=" + std::to_string(n.n_nodes) + ", edges=" +
                   std::to_string(n.edge_count()) + ", kappa=" + std::to_string(n.kappa) + ")";
        });

    py::class_<cs::Partition>(mod, "Partition")
        .def_readonly("cluster_of", &cs::Partition::cluster_of)
        .def_readonly("sizes", &cs::Partition::sizes)
        .def_readonly("K", &cs::Partition::K)
        .def_readonly("K_nontrivial", &cs::Partition::K_nontrivial)
        .def("members", &cs::Partition::members)
        .def("__repr__", [](const cs::Partition& p) {
            return "Partition(K=" + std::to_string(p.K) + ", n_nodes=" +
                   std::to_string(p.n_nodes()) + ")";
        });

    py::class_<cs::TransverseBlock>(mod, "TransverseBlock")
        .def_readonly("R", &cs::TransverseBlock::R)
        .def_readonly("support", &cs::TransverseBlock::support)
        .def_readonly("eigenvalues", &cs::TransverseBlock::eigenvalues);

    py::class_<cs::SpectralDecomposition>(mod, "SpectralDecomposition")
        .def_readonly("T", &cs::SpectralDecomposition::T)
        .def_readonly("Q", &cs::SpectralDecomposition::Q)
        .def_readonly("Qdyn", &cs::SpectralDecomposition::Qdyn)
        .def_readonly("blocks", &cs::SpectralDecomposition::blocks)
        .def_readonly("lambda_Q", &cs::SpectralDecomposition::lambda_Q)
        .def_readonly("lambda_R", &cs::SpectralDecomposition::lambda_R)
        .def_readonly("mu", &cs::SpectralDecomposition::mu)
        .def_readonly("mu_min", &cs::SpectralDecomposition::mu_min)
        .def_readonly("mu_max", &cs::SpectralDecomposition::mu_max)
        .def_readonly("partition", &cs::SpectralDecomposition::partition)
        .def_readonly("kappa", &cs::SpectralDecomposition::kappa)
        .def("fully_separated", &cs::SpectralDecomposition::fully_separated);

    py::class_<cs::CompleteSyncIndices>(mod, "CompleteSyncIndices")
        .def_readonly("alpha_b", &cs::CompleteSyncIndices::alpha_b)
        .def_readonly("alpha_u", &cs::CompleteSyncIndices::alpha_u)
        .def_readonly("lambda2", &cs::CompleteSyncIndices::lambda2)
        .def_readonly("lambdaN", &cs::CompleteSyncIndices::lambdaN);

    py::class_<cs::Owner>(mod, "Owner")
        .def_readonly("is_block", &cs::Owner::is_block)
        .def_readonly("index", &cs::Owner::index)
        .def_readonly("label", &cs::Owner::label)
        .def_readonly("clusters", &cs::Owner::clusters)
        .def("__repr__", [](const cs::Owner& o) { return "Owner(" + o.label + ")"; });

    py::class_<cs::SigmaInterval>(mod, "SigmaInterval")
        .def_readonly("lo", &cs::SigmaInterval::lo)
        .def_readonly("hi", &cs::SigmaInterval::hi)
        .def_readonly("bounded", &cs::SigmaInterval::bounded)
        .def_readonly("empty", &cs::SigmaInterval::empty)
        .def_readonly("owner", &cs::SigmaInterval::owner)
        .def_readonly("windows", &cs::SigmaInterval::windows)
        .def_readonly("note", &cs::SigmaInterval::note);

    py::class_<cs::StabilityCurvePoint>(mod, "StabilityCurvePoint")
        .def_readonly("sigma", &cs::StabilityCurvePoint::sigma)
        .def_readonly("mle", &cs::StabilityCurvePoint::mle)
        .def_readonly("converged", &cs::StabilityCurvePoint::converged)
        .def_readonly("quotient_diverged", &cs::StabilityCurvePoint::quotient_diverged);

    py::class_<cs::StabilityProfile>(mod, "StabilityProfile")
        .def_readonly("owners", &cs::StabilityProfile::owners)
        .def_readonly("curve", &cs::StabilityProfile::curve)
        .def_readonly("intervals", &cs::StabilityProfile::intervals);

    py::enum_<cs::PairType>(mod, "PairType")
        .value("Matryoshka", cs::PairType::Matryoshka)
        .value("Identical", cs::PairType::Identical)
        .value("PartiallyDisjoint", cs::PairType::PartiallyDisjoint)
        .value("CompleteDisjoint", cs::PairType::CompleteDisjoint);

    py::class_<cs::PairClassification>(mod, "PairClassification")
        .def_readonly("a", &cs::PairClassification::a)
        .def_readonly("b", &cs::PairClassification::b)
        .def_readonly("type", &cs::PairClassification::type)
        .def_readonly("inner", &cs::PairClassification::inner)
        .def_readonly("note", &cs::PairClassification::note);

    py::class_<cs::NetworkInterval>(mod, "NetworkInterval")
        .def_readonly("empty", &cs::NetworkInterval::empty)
        .def_readonly("lo", &cs::NetworkInterval::lo)
        .def_readonly("hi", &cs::NetworkInterval::hi)
        .def_readonly("bounded", &cs::NetworkInterval::bounded)
        .def_readonly("k1", &cs::NetworkInterval::k1)
        .def_readonly("k2", &cs::NetworkInterval::k2);

    py::class_<cs::EtaResult>(mod, "EtaResult")
        .def_readonly("defined", &cs::EtaResult::defined)
        .def_readonly("value", &cs::EtaResult::value)
        .def_readonly("block_level", &cs::EtaResult::block_level)
        .def_readonly("note", &cs::EtaResult::note);

    py::class_<cs::OwnerIndices>(mod, "OwnerIndices")
        .def_readonly("owner", &cs::OwnerIndices::owner)
        .def_readonly("eta_b_k", &cs::OwnerIndices::eta_b_k)
        .def_readonly("eta_u_k", &cs::OwnerIndices::eta_u_k)
        .def_readonly("block_level", &cs::OwnerIndices::block_level);

    py::class_<cs::CSReport>(mod, "CSReport")
        .def_readonly("owners", &cs::CSReport::owners)
        .def_readonly("intervals", &cs::CSReport::intervals)
        .def_readonly("pairs", &cs::CSReport::pairs)
        .def_readonly("net", &cs::CSReport::net)
        .def_readonly("rho", &cs::CSReport::rho_value)
        .def_readonly("eta_b", &cs::CSReport::eta_b_value)
        .def_readonly("eta_u", &cs::CSReport::eta_u_value)
        .def_readonly("per_owner", &cs::CSReport::per_owner)
        .def_readonly("complete_sync", &cs::CSReport::complete_sync);

    py::class_<cs::SyncErrorResult>(mod, "SyncErrorResult")
        .def_readonly("E", &cs::SyncErrorResult::E)
        .def_readonly("synchronized", &cs::SyncErrorResult::synchronized)
        .def_readonly("diverged", &cs::SyncErrorResult::diverged);

    // ------------------------------------------------------------ loading

    mod.def(
        "load_network",
        [](const std::string& path, const std::string& format, bool one_based, double kappa) {
            return cs::load_edge_list(path, parse_format(format), one_based, kappa);
        },
        py::arg("path"), py::arg("format") = "plain", py::arg("one_based") = true,
        py::arg("kappa") = 0.0,
        "Load a weighted undirected edge list ('plain' or 'matrix-market').");
    mod.def("save_network", &cs::save_edge_list, py::arg("network"), py::arg("path"));
    mod.def(
        "make_network",
        [](int n_nodes, const std::vector<std::tuple<int, int, double>>& edges, double kappa) {
            std::vector<cs::Edge> es;
            es.reserve(edges.size());
            for (const auto& [i, j, w] : edges) es.push_back({i, j, w});
            return cs::make_network(n_nodes, es, kappa);
        },
        py::arg("n_nodes"), py::arg("edges"), py::arg("kappa") = 0.0,
        "Build a network from (i, j, w) tuples (zero-based node indices).");
    mod.def("two_population_network", &cs::two_population_network, py::arg("w_a"),
            py::arg("w_b"), py::arg("w_c"), py::arg("kappa"),
            "Benchmark network: a 10-node circulant ring C10(1,2,3) with intra weight w_a, "
            "a 5-node complete graph with intra weight w_b, complete bipartite coupling w_c.");
    mod.def(
        "example_network",
        [](const std::string& name) { return cs::generate_example(name).network; },
        py::arg("name"),
        "Bundled example by name: fig2-case-a, fig2-case-b, fig2-case-c, or fig4:<w_a>.");

    mod.def(
        "adjacency", [](const cs::Network& n) { return cs::adjacency(n).mat(); },
        py::arg("network"));
    mod.def(
        "shifted_adjacency", [](const cs::Network& n) { return cs::shifted_adjacency(n).mat(); },
        py::arg("network"), "A - kappa * I as a dense array.");
    mod.def(
        "laplacian", [](const cs::Network& n) { return cs::laplacian(n).mat(); },
        py::arg("network"));

    // ---------------------------------------------------------- partition

    mod.def(
        "minimum_balanced_coloring",
        [](const Eigen::MatrixXd& At, double tol) {
            return cs::minimum_balanced_coloring(as_sym(At, tol));
        },
        py::arg("At"), py::arg("tol") = 0.0,
        "Coarsest equitable partition (minimum balanced coloring) of a symmetric matrix.");
    mod.def(
        "minimum_balanced_coloring",
        [](const cs::Network& n) { return cs::minimum_balanced_coloring(cs::shifted_adjacency(n)); },
        py::arg("network"), "Coloring of the network's shifted adjacency A - kappa I.");
    mod.def(
        "is_equitable",
        [](const Eigen::MatrixXd& At, const cs::Partition& p, double tol) {
            return cs::is_equitable(as_sym(At, tol), p);
        },
        py::arg("At"), py::arg("partition"), py::arg("tol") = 0.0);
    mod.def(
        "quotient_matrix",
        [](const Eigen::MatrixXd& At, const cs::Partition& p, double tol) {
            return cs::quotient_matrix(as_sym(At, tol), p);
        },
        py::arg("At"), py::arg("partition"), py::arg("tol") = 0.0,
        "Row-sum quotient; throws ValueError when the partition is not equitable.");

    // ----------------------------------------------------------- spectral

    mod.def(
        "decompose",
        [](const Eigen::MatrixXd& At, const cs::Partition& p, std::uint64_t seed, double tol) {
            return cs::decompose(as_sym(At, tol), p, seed);
        },
        py::arg("At"), py::arg("partition"), py::arg("seed") = 12345, py::arg("tol") = 0.0,
        "Orthogonal quotient/transverse transform with finest block diagonalization.");
    mod.def(
        "decompose",
        [](const cs::Network& n, std::uint64_t seed) {
            auto At = cs::shifted_adjacency(n);
            return cs::decompose(At, cs::minimum_balanced_coloring(At), seed);
        },
        py::arg("network"), py::arg("seed") = 12345,
        "Coloring plus decomposition of the network's shifted adjacency.");
    mod.def("detect_intertwined", &cs::detect_intertwined, py::arg("decomposition"),
            "Cluster-index groups sharing a transverse block (empty when fully separated).");
    mod.def(
        "complete_sync_indices",
        [](const cs::Network& n) { return cs::complete_sync_indices(cs::laplacian(n)); },
        py::arg("network"),
        "alpha_b = lambda_2/lambda_N and alpha_u = lambda_2 of the Laplacian; raises "
        "ValueError for disconnected graphs.");
    mod.def(
        "suggest_kappa",
        [](const Eigen::MatrixXd& A, const cs::Partition& p, double target_mu_min,
           std::uint64_t seed, double tol) {
            return cs::suggest_kappa(as_sym(A, tol), p, target_mu_min, seed);
        },
        py::arg("A"), py::arg("partition"), py::arg("target_mu_min"), py::arg("seed") = 12345,
        py::arg("tol") = 0.0);

    // ----------------------------------------------------------- dynamics

    auto knob_args = [](ProfileKnobs& k, double dt, double settle, double mle_transient,
                        double mle_horizon, double eps_conv, double refine_tol,
                        double unbounded_margin, std::uint64_t seed) {
        k.dt = dt;
        k.settle = settle;
        k.mle_transient = mle_transient;
        k.mle_horizon = mle_horizon;
        k.eps_conv = eps_conv;
        k.refine_tol = refine_tol;
        k.unbounded_margin = unbounded_margin;
        k.seed = seed;
    };

    mod.def(
        "stability_profile",
        [knob_args](const cs::SpectralDecomposition& d, double sigma_lo, double sigma_hi,
                    double sigma_step, double dt, double settle, double mle_transient,
                    double mle_horizon, double eps_conv, double refine_tol,
                    double unbounded_margin, std::uint64_t seed) {
            cs::SigmaGrid grid{sigma_lo, sigma_hi, sigma_step};
            ProfileKnobs k;
            knob_args(k, dt, settle, mle_transient, mle_horizon, eps_conv, refine_tol,
                      unbounded_margin, seed);
            py::gil_scoped_release release;
            return cs::stability_profile(d, cs::van_der_pol(), grid, k.params());
        },
        py::arg("decomposition"), py::arg("sigma_lo"), py::arg("sigma_hi"),
        py::arg("sigma_step"), py::arg("dt") = 1e-3, py::arg("settle") = 100.0,
        py::arg("mle_transient") = 100.0, py::arg("mle_horizon") = 400.0,
        py::arg("eps_conv") = 5e-3, py::arg("refine_tol") = 1e-3,
        py::arg("unbounded_margin") = 0.05, py::arg("seed") = 12345,
        "Per-owner maximum-Lyapunov-exponent curves over a sigma grid, with stable "
        "sigma-intervals refined by bisection (Van der Pol units).");

    mod.def(
        "sync_errors",
        [](const cs::Network& net, const cs::SpectralDecomposition& d, double sigma, double dt,
           double settle, double horizon, double window_lo, double window_hi, double delta,
           double sync_threshold_scale, std::uint64_t seed) {
            ProfileKnobs k;
            k.dt = dt;
            k.settle = settle;
            k.horizon = horizon;
            k.window_lo = window_lo;
            k.window_hi = window_hi;
            k.delta = delta;
            k.sync_threshold_scale = sync_threshold_scale;
            k.seed = seed;
            auto params = k.params();
            py::gil_scoped_release release;
            auto At = cs::shifted_adjacency(net);
            cs::QuotientChain chain(d.Qdyn, cs::van_der_pol(), params.integ, params.chain);
            const auto& s0 = chain.advance_to(sigma);
            return cs::simulate_network(At, d.partition, cs::van_der_pol(), sigma, s0,
                                        params.integ, params.sim);
        },
        py::arg("network"), py::arg("decomposition"), py::arg("sigma"), py::arg("dt") = 1e-3,
        py::arg("settle") = 100.0, py::arg("horizon") = 500.0, py::arg("window_lo") = 450.0,
        py::arg("window_hi") = 500.0, py::arg("delta") = 1e-4,
        py::arg("sync_threshold_scale") = 1e-3, py::arg("seed") = 12345,
        "Per-cluster synchronization errors E_k of the perturbed full network at one sigma.");

    // ----------------------------------------------------- classification

    mod.def("classify_all", &cs::classify_all, py::arg("profile"), py::arg("tol") = 1e-3);
    mod.def("network_interval", &cs::network_interval, py::arg("profile"));
    mod.def("rho", &cs::rho, py::arg("network_interval"));
    mod.def("eta_b", &cs::eta_b, py::arg("decomposition"), py::arg("profile"),
            py::arg("network_interval"));
    mod.def("eta_u", &cs::eta_u, py::arg("profile"));
    mod.def("owner_indices", &cs::owner_indices, py::arg("decomposition"), py::arg("profile"));
    mod.def(
        "build_report",
        [](const cs::SpectralDecomposition& d, const cs::StabilityProfile& profile,
           std::optional<cs::CompleteSyncIndices> idx, double tol) {
            return cs::build_report(d, profile, std::move(idx), tol);
        },
        py::arg("decomposition"), py::arg("profile"),
        py::arg("complete_sync") = std::nullopt, py::arg("tol") = 1e-3,
        "Full classification report: intervals, pair types, network interval, rho, "
        "eta_b, eta_u, and per-owner indices.");
}
