#pragma once
// Bundled example networks: a 15-node two-population benchmark (a 10-node
// circulant ring coupled to a 5-node complete graph through a complete
// bipartite layer) in three named parameter cases, plus a w_a-parametric
// variant used by the eta scan.

#include <string>

#include "clustersync/config.hpp"
#include "clustersync/network.hpp"

namespace clustersync {

struct ExampleBundle {
    std::string name;
    Network network;
    RunConfig config;
};

// Two-population network: nodes 0..9 form a circulant ring C10(1,2,3) with
// intra weight w_a; nodes 10..14 form K5 with intra weight w_b; every
// ring/K5 pair is joined with weight w_c. kappa is carried on the Network.
Network two_population_network(double w_a, double w_b, double w_c, double kappa);

// Recognized names: fig2-case-a (w_a=2, w_b=3, w_c=0.1, kappa=12),
// fig2-case-b (w_a=0.1, w_b=3), fig2-case-c (w_a=0.1, w_b=10), and
// fig4:<w_a> (w_b=3, w_c=0.1, kappa=12, w_a parsed from the name).
// Unknown names throw std::invalid_argument.
ExampleBundle generate_example(const std::string& name);

}  // namespace clustersync
