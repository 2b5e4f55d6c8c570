#include "clustersync/examples.hpp"

#include <cmath>
#include <stdexcept>

namespace clustersync {

Network two_population_network(double w_a, double w_b, double w_c, double kappa) {
    std::vector<Edge> edges;
    // Population a: 10-node circulant ring, neighbors at offsets 1, 2, 3.
    for (int i = 0; i < 10; ++i) {
        for (int off : {1, 2, 3}) {
            edges.push_back(Edge{i, (i + off) % 10, w_a});
        }
    }
    // Population b: complete graph on nodes 10..14.
    for (int i = 10; i < 15; ++i) {
        for (int j = i + 1; j < 15; ++j) {
            edges.push_back(Edge{i, j, w_b});
        }
    }
    // Complete bipartite inter-population layer.
    for (int i = 0; i < 10; ++i) {
        for (int j = 10; j < 15; ++j) {
            edges.push_back(Edge{i, j, w_c});
        }
    }
    return make_network(15, edges, kappa);
}

namespace {

// Accepts "fig4:2.5", "fig4(2.5)", "fig4(w_a=2.5)", "fig4:w_a=2.5".
bool parse_fig4(const std::string& name, double& w_a) {
    if (name.rfind("fig4", 0) != 0) return false;
    std::string rest = name.substr(4);
    if (!rest.empty() && (rest.front() == ':' || rest.front() == '(')) {
        rest.erase(rest.begin());
    }
    if (!rest.empty() && rest.back() == ')') rest.pop_back();
    if (rest.rfind("w_a=", 0) == 0) rest = rest.substr(4);
    if (rest.empty()) return false;
    std::size_t used = 0;
    try {
        w_a = std::stod(rest, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == rest.size() && std::isfinite(w_a);
}

RunConfig base_config(const std::string& name, double grid_hi) {
    RunConfig cfg;
    cfg.example = name;
    cfg.kappa = 12.0;
    cfg.grid.lo = 0.005;
    cfg.grid.hi = grid_hi;
    cfg.grid.step = 0.005;
    return cfg;
}

}  // namespace

ExampleBundle generate_example(const std::string& name) {
    ExampleBundle out;
    out.name = name;
    double w_a = 0.0;
    if (name == "fig2-case-a") {
        out.network = two_population_network(2.0, 3.0, 0.1, 12.0);
        out.config = base_config(name, 4.5);
    } else if (name == "fig2-case-b") {
        out.network = two_population_network(0.1, 3.0, 0.1, 12.0);
        out.config = base_config(name, 4.5);
    } else if (name == "fig2-case-c") {
        out.network = two_population_network(0.1, 10.0, 0.1, 12.0);
        out.config = base_config(name, 4.5);
    } else if (parse_fig4(name, w_a)) {
        out.network = two_population_network(w_a, 3.0, 0.1, 12.0);
        out.config = base_config(name, 5.0);
    } else {
        throw std::invalid_argument(
            "unknown example '" + name +
            "' (expected fig2-case-a, fig2-case-b, fig2-case-c, or fig4:<w_a>)");
    }
    return out;
}

}  // namespace clustersync
