#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "clustersync/network.hpp"

namespace cs = clustersync;
namespace fs = std::filesystem;

namespace {

fs::path tmpfile(const std::string& name) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() / "cs_net_tests";
    fs::create_directories(dir);
    return dir / (std::to_string(counter++) + "_" + name);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

cs::Network random_network(std::mt19937_64& rng, int n, double p_edge) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_real_distribution<double> wdist(0.1, 5.0);
    std::vector<cs::Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (coin(rng) < p_edge) edges.push_back({i, j, wdist(rng)});
        }
    }
    if (edges.empty()) edges.push_back({0, n - 1, 1.0});
    return cs::make_network(n, edges, 0.0);
}

}  // namespace

TEST_CASE("make_network canonicalizes and validates") {
    auto net = cs::make_network(4, {{2, 0, 1.5}, {0, 2, 1.5}, {1, 3, 2.0}}, 7.0);
    CHECK(net.n_nodes == 4);
    CHECK(net.kappa == 7.0);
    REQUIRE(net.edge_count() == 2);
    CHECK(net.edges[0].i == 0);
    CHECK(net.edges[0].j == 2);
    CHECK(net.edges[0].w == 1.5);
    CHECK(net.edges[1].i == 1);
    CHECK(net.edges[1].j == 3);

    CHECK_THROWS_AS(cs::make_network(0, {}, 0.0), cs::NetworkIoError);
    CHECK_THROWS_AS(cs::make_network(3, {{0, 0, 1.0}}, 0.0), cs::NetworkIoError);
    CHECK_THROWS_AS(cs::make_network(3, {{0, 3, 1.0}}, 0.0), cs::NetworkIoError);
    CHECK_THROWS_AS(cs::make_network(3, {{0, 1, 1.0}, {1, 0, 2.0}}, 0.0), cs::NetworkIoError);
}

TEST_CASE("adjacency, shifted adjacency, and Laplacian") {
    auto net = cs::make_network(3, {{0, 1, 2.0}, {1, 2, 3.0}}, 5.0);
    auto A = cs::adjacency(net);
    CHECK(A(0, 1) == 2.0);
    CHECK(A(1, 0) == 2.0);
    CHECK(A(1, 2) == 3.0);
    CHECK(A(0, 2) == 0.0);
    CHECK(A(0, 0) == 0.0);

    auto At = cs::shifted_adjacency(net);
    CHECK(At(0, 0) == -5.0);
    CHECK(At(1, 1) == -5.0);
    CHECK(At(0, 1) == 2.0);

    auto L = cs::laplacian(net);
    CHECK(L(0, 0) == 2.0);
    CHECK(L(1, 1) == 5.0);
    CHECK(L(2, 2) == 3.0);
    CHECK(L(0, 1) == -2.0);
}

TEST_CASE("Laplacian rows sum to zero exactly") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        auto net = random_network(rng, 12, 0.4);
        auto L = cs::laplacian(net);
        for (int i = 0; i < net.n_nodes; ++i) {
            double off = 0.0;
            for (int j = 0; j < net.n_nodes; ++j) {
                if (j != i) off += L(i, j);
            }
            // Exact in IEEE arithmetic: the diagonal is accumulated in the
            // same ascending-index order as this loop, and negation is exact.
            CHECK(L(i, i) == -off);
        }
    }
}

TEST_CASE("plain edge list round trip") {
    std::mt19937_64 rng(7);
    auto net = random_network(rng, 9, 0.35);
    auto path = tmpfile("roundtrip.edges");
    cs::save_edge_list(net, path.string());
    auto back = cs::load_edge_list(path.string(), cs::EdgeListFormat::PlainEdgeList, true, 0.0);
    REQUIRE(back.n_nodes == net.n_nodes);
    REQUIRE(back.edge_count() == net.edge_count());
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
        CHECK(back.edges[e].i == net.edges[e].i);
        CHECK(back.edges[e].j == net.edges[e].j);
        CHECK(back.edges[e].w == net.edges[e].w);  // %.17g preserves doubles
    }
}

TEST_CASE("plain loader honors the nodes header for isolated nodes") {
    auto net = cs::make_network(6, {{0, 1, 1.0}}, 0.0);  // nodes 2..5 isolated
    auto path = tmpfile("isolated.edges");
    cs::save_edge_list(net, path.string());
    auto back = cs::load_edge_list(path.string(), cs::EdgeListFormat::PlainEdgeList, true, 0.0);
    CHECK(back.n_nodes == 6);
}

TEST_CASE("plain loader: base handling and parse errors cite path:line") {
    auto p0 = tmpfile("zero.edges");
    write_file(p0, "0 1 2.5\n1 2 1.0\n");
    auto net = cs::load_edge_list(p0.string(), cs::EdgeListFormat::PlainEdgeList, false, 0.0);
    CHECK(net.n_nodes == 3);
    CHECK(cs::adjacency(net)(0, 1) == 2.5);

    auto p1 = tmpfile("bad.edges");
    write_file(p1, "1 2 1.0\nfoo bar\n");
    try {
        cs::load_edge_list(p1.string(), cs::EdgeListFormat::PlainEdgeList, true, 0.0);
        FAIL("expected NetworkIoError");
    } catch (const cs::NetworkIoError& e) {
        std::string msg = e.what();
        CHECK(msg.find(p1.string() + ":2") != std::string::npos);
    }

    auto p2 = tmpfile("zero_in_onebased.edges");
    write_file(p2, "0 1 1.0\n");
    CHECK_THROWS_AS(cs::load_edge_list(p2.string(), cs::EdgeListFormat::PlainEdgeList, true, 0.0),
                    cs::NetworkIoError);

    auto p3 = tmpfile("empty.edges");
    write_file(p3, "# only a comment\n");
    CHECK_THROWS_AS(cs::load_edge_list(p3.string(), cs::EdgeListFormat::PlainEdgeList, true, 0.0),
                    cs::NetworkIoError);

    CHECK_THROWS_AS(
        cs::load_edge_list("/nonexistent/nope.edges", cs::EdgeListFormat::PlainEdgeList, true, 0.0),
        cs::NetworkIoError);
}

TEST_CASE("matrix market: symmetric, general, pattern, and errors") {
    auto p1 = tmpfile("sym.mtx");
    write_file(p1,
               "%%MatrixMarket matrix coordinate real symmetric\n"
               "% comment\n"
               "3 3 2\n"
               "2 1 1.5\n"
               "3 2 2.5\n");
    auto net = cs::load_edge_list(p1.string(), cs::EdgeListFormat::MatrixMarket, true, 0.0);
    CHECK(net.n_nodes == 3);
    CHECK(cs::adjacency(net)(0, 1) == 1.5);
    CHECK(cs::adjacency(net)(1, 2) == 2.5);

    auto p2 = tmpfile("gen.mtx");
    write_file(p2,
               "%%MatrixMarket matrix coordinate real general\n"
               "2 2 2\n"
               "1 2 4.0\n"
               "2 1 4.0\n");
    auto net2 = cs::load_edge_list(p2.string(), cs::EdgeListFormat::MatrixMarket, true, 0.0);
    CHECK(net2.edge_count() == 1);
    CHECK(cs::adjacency(net2)(0, 1) == 4.0);

    auto p3 = tmpfile("pattern.mtx");
    write_file(p3,
               "%%MatrixMarket matrix coordinate pattern symmetric\n"
               "3 3 2\n"
               "2 1\n"
               "3 1\n");
    auto net3 = cs::load_edge_list(p3.string(), cs::EdgeListFormat::MatrixMarket, true, 0.0);
    CHECK(cs::adjacency(net3)(0, 1) == 1.0);
    CHECK(cs::adjacency(net3)(0, 2) == 1.0);

    // Directed (asymmetric general) input is rejected as a weight conflict.
    auto p4 = tmpfile("asym.mtx");
    write_file(p4,
               "%%MatrixMarket matrix coordinate real general\n"
               "2 2 2\n"
               "1 2 4.0\n"
               "2 1 5.0\n");
    CHECK_THROWS_AS(cs::load_edge_list(p4.string(), cs::EdgeListFormat::MatrixMarket, true, 0.0),
                    cs::NetworkIoError);

    // nnz mismatch.
    auto p5 = tmpfile("nnz.mtx");
    write_file(p5,
               "%%MatrixMarket matrix coordinate real symmetric\n"
               "3 3 5\n"
               "2 1 1.0\n");
    CHECK_THROWS_AS(cs::load_edge_list(p5.string(), cs::EdgeListFormat::MatrixMarket, true, 0.0),
                    cs::NetworkIoError);

    // Self-loop.
    auto p6 = tmpfile("loop.mtx");
    write_file(p6,
               "%%MatrixMarket matrix coordinate real symmetric\n"
               "2 2 1\n"
               "1 1 3.0\n");
    CHECK_THROWS_AS(cs::load_edge_list(p6.string(), cs::EdgeListFormat::MatrixMarket, true, 0.0),
                    cs::NetworkIoError);

    // Non-square.
    auto p7 = tmpfile("rect.mtx");
    write_file(p7,
               "%%MatrixMarket matrix coordinate real symmetric\n"
               "2 3 1\n"
               "2 1 3.0\n");
    CHECK_THROWS_AS(cs::load_edge_list(p7.string(), cs::EdgeListFormat::MatrixMarket, true, 0.0),
                    cs::NetworkIoError);
}

TEST_CASE("DenseSymMatrix::from_dense symmetry check") {
    Eigen::MatrixXd M(2, 2);
    M << 0.0, 1.0, 1.0 + 1e-3, 0.0;
    CHECK_THROWS_AS(cs::DenseSymMatrix::from_dense(M, 1e-9), std::invalid_argument);
    auto S = cs::DenseSymMatrix::from_dense(M, 1e-2);
    CHECK(S(0, 1) == S(1, 0));
    CHECK(S(0, 1) == 1.0 + 1e-3);  // lower triangle wins
    CHECK(S.max_abs() == 1.0 + 1e-3);
}
