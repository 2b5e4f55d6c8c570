#pragma once
// Run configuration shared by the CLI subcommands: input selection, grid
// and integration parameters, tolerances, seed, output directory. A plain
// key=value config file can preload any field; flags override it.

#include <cstdint>
#include <optional>
#include <string>

#include "clustersync/dynamics.hpp"
#include "clustersync/network.hpp"

namespace clustersync {

struct RunConfig {
    std::string input;  // edge-list path; empty when --example is used
    EdgeListFormat format = EdgeListFormat::PlainEdgeList;
    bool one_based = true;
    std::string example;  // bundled example name (mutually exclusive with input)

    double kappa = 0.0;
    std::optional<double> target_mu_min;  // when set, kappa is suggested

    SigmaGrid grid;
    double dt = 1e-3;
    double horizon = 500.0;
    double window_lo = 450.0;
    double window_hi = 500.0;

    std::optional<double> eps_eq;  // default: 1e-9 * max|A~|
    double eps_conv = 5e-3;
    double sync_threshold_scale = 1e-3;
    double refine_tol = 1e-3;
    double delta = 1e-4;
    double settle = 100.0;
    double mle_transient = 100.0;
    double mle_horizon = 400.0;

    std::uint64_t seed = 12345;
    std::string outdir = ".";

    // Subcommand-specific knobs.
    double sigma = 0.0;          // msf/complete rows that need one sigma
    std::string scan_values;     // comma-separated w values for `scan`
    std::string scan_param = "w_a";

    DynamicsParams dynamics_params() const;
    void validate() const;  // throws std::invalid_argument
};

// Parses `key = value` lines (# comments, blank lines ignored) into cfg.
// Unknown keys are an error. Returns the list of keys set.
std::vector<std::string> load_config_file(const std::string& path, RunConfig& cfg);

// Serializes every field as key=value lines (used by manifests).
std::string dump_config(const RunConfig& cfg);

// FNV-1a 64-bit checksum of a file's bytes, hex-encoded.
std::string file_checksum_hex(const std::string& path);

std::string library_version();

}  // namespace clustersync
