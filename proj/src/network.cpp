#include "clustersync/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace clustersync {

DenseSymMatrix DenseSymMatrix::from_dense(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("DenseSymMatrix: matrix is not square");
    }
    DenseSymMatrix out(static_cast<int>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) {
        out.m_(i, i) = m(i, i);
        for (int j = 0; j < i; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > tol) {
                throw std::invalid_argument("DenseSymMatrix: asymmetric beyond tolerance at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
            out.m_(i, j) = m(i, j);
            out.m_(j, i) = m(i, j);
        }
    }
    return out;
}

Network make_network(int n_nodes, const std::vector<Edge>& raw_edges, double kappa) {
    if (n_nodes <= 0) {
        throw NetworkIoError("network must have at least one node");
    }
    std::map<std::pair<int, int>, double> canon;
    for (const Edge& e : raw_edges) {
        int i = e.i, j = e.j;
        if (i < 0 || j < 0 || i >= n_nodes || j >= n_nodes) {
            throw NetworkIoError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") index out of range for " + std::to_string(n_nodes) + " nodes");
        }
        if (i == j) {
            throw NetworkIoError("self-loop forbidden at node " + std::to_string(i));
        }
        if (i > j) std::swap(i, j);
        auto [it, inserted] = canon.emplace(std::make_pair(i, j), e.w);
        if (!inserted && it->second != e.w) {
            throw NetworkIoError("conflicting weights for edge (" + std::to_string(i) + "," +
                                 std::to_string(j) + "): " + std::to_string(it->second) +
                                 " vs " + std::to_string(e.w));
        }
    }
    Network net;
    net.n_nodes = n_nodes;
    net.kappa = kappa;
    net.edges.reserve(canon.size());
    for (const auto& [key, w] : canon) {
        net.edges.push_back(Edge{key.first, key.second, w});
    }
    return net;
}

namespace {

// Strips a trailing comment and surrounding whitespace.
std::string strip_line(const std::string& line, char comment) {
    std::string s = line;
    auto pos = s.find(comment);
    if (pos != std::string::npos) s.erase(pos);
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && issp(s[b])) ++b;
    return s.substr(b);
}

[[noreturn]] void parse_fail(const std::string& path, int lineno, const std::string& what) {
    throw NetworkIoError(path + ":" + std::to_string(lineno) + ": " + what);
}

double parse_weight(const std::string& tok, const std::string& path, int lineno) {
    std::size_t used = 0;
    double w = 0.0;
    try {
        w = std::stod(tok, &used);
    } catch (const std::exception&) {
        parse_fail(path, lineno, "cannot parse weight '" + tok + "'");
    }
    if (used != tok.size() || !std::isfinite(w)) {
        parse_fail(path, lineno, "cannot parse weight '" + tok + "'");
    }
    return w;
}

long parse_index(const std::string& tok, const std::string& path, int lineno) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(tok, &used);
    } catch (const std::exception&) {
        parse_fail(path, lineno, "cannot parse node index '" + tok + "'");
    }
    if (used != tok.size()) {
        parse_fail(path, lineno, "cannot parse node index '" + tok + "'");
    }
    return v;
}

std::vector<std::string> tokens_of(const std::string& s) {
    std::istringstream iss(s);
    std::vector<std::string> toks;
    std::string t;
    while (iss >> t) toks.push_back(t);
    return toks;
}

Network load_plain(const std::string& path, std::ifstream& in, bool one_based, double kappa) {
    std::vector<Edge> edges;
    std::string line;
    int lineno = 0;
    long max_index = -1;
    long declared_nodes = -1;
    while (std::getline(in, line)) {
        ++lineno;
        // Honor the "# nodes N" header save_edge_list writes so isolated
        // trailing nodes survive a round trip.
        {
            auto htoks = tokens_of(line);
            if (htoks.size() == 3 && htoks[0] == "#" && htoks[1] == "nodes") {
                declared_nodes = parse_index(htoks[2], path, lineno);
            }
        }
        std::string s = strip_line(line, '#');
        if (s.empty()) continue;
        auto toks = tokens_of(s);
        if (toks.size() != 2 && toks.size() != 3) {
            parse_fail(path, lineno, "expected 'i j [w]', got " + std::to_string(toks.size()) +
                                         " fields");
        }
        long i = parse_index(toks[0], path, lineno);
        long j = parse_index(toks[1], path, lineno);
        double w = toks.size() == 3 ? parse_weight(toks[2], path, lineno) : 1.0;
        if (one_based) {
            if (i < 1 || j < 1) parse_fail(path, lineno, "index below 1 in one-based input");
            --i;
            --j;
        } else if (i < 0 || j < 0) {
            parse_fail(path, lineno, "negative node index");
        }
        max_index = std::max({max_index, i, j});
        edges.push_back(Edge{static_cast<int>(i), static_cast<int>(j), w});
    }
    if (max_index < 0 && declared_nodes < 1) {
        throw NetworkIoError(path + ": no edges found");
    }
    const long n = std::max(max_index + 1, declared_nodes);
    return make_network(static_cast<int>(n), edges, kappa);
}

Network load_matrix_market(const std::string& path, std::ifstream& in, double kappa) {
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) {
        throw NetworkIoError(path + ": empty file");
    }
    ++lineno;
    {
        std::istringstream iss(line);
        std::string banner, object, fmt, field, symmetry;
        iss >> banner >> object >> fmt >> field >> symmetry;
        auto lower = [](std::string s) {
            std::transform(s.begin(), s.end(), s.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            return s;
        };
        if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(fmt) != "coordinate") {
            parse_fail(path, lineno, "expected '%%MatrixMarket matrix coordinate ...' header");
        }
        field = lower(field);
        symmetry = lower(symmetry);
        if (field != "real" && field != "integer" && field != "pattern") {
            parse_fail(path, lineno, "unsupported field '" + field + "'");
        }
        if (symmetry != "symmetric" && symmetry != "general") {
            parse_fail(path, lineno, "unsupported symmetry '" + symmetry +
                                         "' (directed input is rejected)");
        }
    }
    long rows = 0, cols = 0, nnz = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = strip_line(line, '%');
        if (s.empty()) continue;
        auto toks = tokens_of(s);
        if (toks.size() != 3) parse_fail(path, lineno, "expected 'rows cols nnz' size line");
        rows = parse_index(toks[0], path, lineno);
        cols = parse_index(toks[1], path, lineno);
        nnz = parse_index(toks[2], path, lineno);
        break;
    }
    if (rows <= 0 || rows != cols) {
        parse_fail(path, lineno, "adjacency matrix must be square and nonempty");
    }
    std::vector<Edge> edges;
    long seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = strip_line(line, '%');
        if (s.empty()) continue;
        auto toks = tokens_of(s);
        if (toks.size() != 2 && toks.size() != 3) {
            parse_fail(path, lineno, "expected 'i j [w]' entry");
        }
        long i = parse_index(toks[0], path, lineno);
        long j = parse_index(toks[1], path, lineno);
        double w = toks.size() == 3 ? parse_weight(toks[2], path, lineno) : 1.0;
        if (i < 1 || j < 1 || i > rows || j > rows) {
            parse_fail(path, lineno, "entry index out of declared range");
        }
        ++seen;
        if (i == j) {
            throw NetworkIoError(path + ":" + std::to_string(lineno) +
                                 ": self-loop forbidden at node " + std::to_string(i));
        }
        edges.push_back(Edge{static_cast<int>(i - 1), static_cast<int>(j - 1), w});
    }
    if (seen != nnz) {
        throw NetworkIoError(path + ": entry count " + std::to_string(seen) +
                             " does not match declared nnz " + std::to_string(nnz));
    }
    return make_network(static_cast<int>(rows), edges, kappa);
}

}  // namespace

Network load_edge_list(const std::string& path, EdgeListFormat format, bool one_based,
                       double kappa) {
    std::ifstream in(path);
    if (!in) {
        throw NetworkIoError("cannot open '" + path + "'");
    }
    switch (format) {
        case EdgeListFormat::PlainEdgeList:
            return load_plain(path, in, one_based, kappa);
        case EdgeListFormat::MatrixMarket:
            return load_matrix_market(path, in, kappa);
    }
    throw NetworkIoError("unknown edge-list format");
}

void save_edge_list(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw NetworkIoError("cannot write '" + path + "'");
    }
    out << "# nodes " << net.n_nodes << "\n";
    char buf[64];
    for (const Edge& e : net.edges) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.w);
        out << (e.i + 1) << " " << (e.j + 1) << " " << buf << "\n";
    }
    if (!out) {
        throw NetworkIoError("write failed for '" + path + "'");
    }
}

DenseSymMatrix adjacency(const Network& net) {
    DenseSymMatrix A(net.n_nodes);
    for (const Edge& e : net.edges) {
        A.set(e.i, e.j, e.w);
    }
    return A;
}

DenseSymMatrix shifted_adjacency(const Network& net) {
    DenseSymMatrix At = adjacency(net);
    for (int i = 0; i < net.n_nodes; ++i) {
        At.set(i, i, -net.kappa);
    }
    return At;
}

DenseSymMatrix laplacian(const Network& net) {
    DenseSymMatrix A = adjacency(net);
    const int n = net.n_nodes;
    DenseSymMatrix L(n);
    for (int i = 0; i < n; ++i) {
        double degree = 0.0;  // ascending-j accumulation; see header contract
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            degree += A(i, j);
            L.set(i, j, -A(i, j));
        }
        L.set(i, i, degree);
    }
    return L;
}

}  // namespace clustersync
