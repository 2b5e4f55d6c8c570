// csnet: cluster-synchronization analysis CLI.
//
// Subcommands: coloring, spectrum, msf, intervals, sweep, classify, scan,
// complete-sync, generate-example. Outputs are CSV (curves/tables) and
// JSON (structured reports); every run writes a manifest.json recording
// the effective config, library version, and input checksum, sufficient
// to reproduce the run. Outputs are byte-identical for identical config
// and seed.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "clustersync/classify.hpp"
#include "clustersync/config.hpp"
#include "clustersync/dynamics.hpp"
#include "clustersync/examples.hpp"
#include "clustersync/network.hpp"
#include "clustersync/partition.hpp"
#include "clustersync/spectral.hpp"

namespace cs = clustersync;
using json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

json num_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

std::filesystem::path outpath(const cs::RunConfig& cfg, const std::string& name) {
    std::filesystem::path dir(cfg.outdir.empty() ? "." : cfg.outdir);
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
    std::cout << "wrote " << path.string() << "\n";
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_manifest(const cs::RunConfig& cfg, const std::string& subcommand,
                    const std::vector<std::string>& outputs) {
    json j;
    j["tool"] = "csnet";
    j["version"] = cs::library_version();
    j["subcommand"] = subcommand;
    if (!cfg.input.empty()) {
        j["input"] = {{"path", cfg.input}, {"fnv1a64", cs::file_checksum_hex(cfg.input)}};
    } else if (!cfg.example.empty()) {
        j["input"] = {{"example", cfg.example}};
    }
    j["outputs"] = outputs;
    j["config"] = cs::dump_config(cfg);
    write_json_file(outpath(cfg, "manifest.json"), j);
}

// Flag values shared by all subcommands; presence is checked per
// subcommand so explicit flags override the config file.
struct Flags {
    std::string config, input, format = "plain", example, outdir, scan_values,
                scan_param = "w_a";
    double kappa = 0.0, target_mu_min = 0.0, sigma_lo = 0.0, sigma_hi = 0.0, sigma_step = 0.0,
           dt = 0.0, horizon = 0.0, window_lo = 0.0, window_hi = 0.0, eps_conv = 0.0,
           sync_threshold = 0.0, refine_tol = 0.0, delta = 0.0, settle = 0.0,
           mle_transient = 0.0, mle_horizon = 0.0, sigma = 0.0;
    std::uint64_t seed = 0;
    bool one_based = true, zero_based = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "key=value config file (flags override it)");
    sub->add_option("--input", f.input, "edge-list input path");
    sub->add_option("--format", f.format, "input format: plain | matrix-market")
        ->check(CLI::IsMember({"plain", "matrix-market"}));
    sub->add_flag("--one-based,!--zero-based", f.one_based,
                  "plain edge-list index base (default one-based)");
    sub->add_option("--example", f.example,
                    "bundled example name (fig2-case-a|fig2-case-b|fig2-case-c|fig4:<w_a>)");
    sub->add_option("--kappa", f.kappa, "diagonal shift kappa");
    sub->add_option("--target-mu-min", f.target_mu_min,
                    "choose kappa so all transverse mu >= this value");
    sub->add_option("--outdir", f.outdir, "output directory (default .)");
    sub->add_option("--seed", f.seed, "seed for all randomness (SBD probe, ICs, perturbations)");
    sub->add_option("--sigma-lo", f.sigma_lo, "sigma grid lower end");
    sub->add_option("--sigma-hi", f.sigma_hi, "sigma grid upper end");
    sub->add_option("--sigma-step", f.sigma_step, "sigma grid step");
    sub->add_option("--dt", f.dt, "integrator step");
    sub->add_option("--horizon", f.horizon, "network simulation horizon");
    sub->add_option("--window-lo", f.window_lo, "stats window start");
    sub->add_option("--window-hi", f.window_hi, "stats window end");
    sub->add_option("--eps-conv", f.eps_conv, "MLE convergence tolerance");
    sub->add_option("--sync-threshold", f.sync_threshold, "sync threshold scale (per node)");
    sub->add_option("--refine-tol", f.refine_tol, "interval bisection tolerance");
    sub->add_option("--delta", f.delta, "perturbation magnitude");
    sub->add_option("--settle", f.settle, "per-sigma quotient settling time");
    sub->add_option("--mle-transient", f.mle_transient, "MLE transient discarded");
    sub->add_option("--mle-horizon", f.mle_horizon, "MLE integration horizon");
    sub->add_option("--scan-values", f.scan_values, "comma-separated weights for scan");
    sub->add_option("--scan-param", f.scan_param, "scan parameter: w_a | w_b | w_c")
        ->check(CLI::IsMember({"w_a", "w_b", "w_c"}));
}

// Defaults (example bundle when --example is the source), then config
// file, then explicit flags.
cs::RunConfig resolve_config(const CLI::App* sub, const Flags& f) {
    cs::RunConfig cfg;
    if (sub->count("--example") && !sub->count("--config")) {
        cfg = cs::generate_example(f.example).config;
    }
    if (sub->count("--config")) {
        cs::load_config_file(f.config, cfg);
    }
    if (sub->count("--input")) cfg.input = f.input;
    if (sub->count("--format")) {
        cfg.format = f.format == "plain" ? cs::EdgeListFormat::PlainEdgeList
                                         : cs::EdgeListFormat::MatrixMarket;
    }
    if (sub->count("--one-based") || sub->count("--zero-based")) cfg.one_based = f.one_based;
    if (sub->count("--example")) cfg.example = f.example;
    if (sub->count("--kappa")) cfg.kappa = f.kappa;
    if (sub->count("--target-mu-min")) cfg.target_mu_min = f.target_mu_min;
    if (sub->count("--outdir")) cfg.outdir = f.outdir;
    if (sub->count("--seed")) cfg.seed = f.seed;
    if (sub->count("--sigma-lo")) cfg.grid.lo = f.sigma_lo;
    if (sub->count("--sigma-hi")) cfg.grid.hi = f.sigma_hi;
    if (sub->count("--sigma-step")) cfg.grid.step = f.sigma_step;
    if (sub->count("--dt")) cfg.dt = f.dt;
    if (sub->count("--horizon")) cfg.horizon = f.horizon;
    if (sub->count("--window-lo")) cfg.window_lo = f.window_lo;
    if (sub->count("--window-hi")) cfg.window_hi = f.window_hi;
    if (sub->count("--eps-conv")) cfg.eps_conv = f.eps_conv;
    if (sub->count("--sync-threshold")) cfg.sync_threshold_scale = f.sync_threshold;
    if (sub->count("--refine-tol")) cfg.refine_tol = f.refine_tol;
    if (sub->count("--delta")) cfg.delta = f.delta;
    if (sub->count("--settle")) cfg.settle = f.settle;
    if (sub->count("--mle-transient")) cfg.mle_transient = f.mle_transient;
    if (sub->count("--mle-horizon")) cfg.mle_horizon = f.mle_horizon;
    if (sub->count("--scan-values")) cfg.scan_values = f.scan_values;
    if (sub->count("--scan-param")) cfg.scan_param = f.scan_param;
    cfg.validate();
    return cfg;
}

struct Pipeline {
    cs::Network net;
    cs::DenseSymMatrix At;
    cs::Partition part;
};

Pipeline load_pipeline(cs::RunConfig& cfg) {
    Pipeline p;
    if (!cfg.example.empty()) {
        p.net = cs::generate_example(cfg.example).network;
        p.net.kappa = cfg.kappa;
    } else if (!cfg.input.empty()) {
        p.net = cs::load_edge_list(cfg.input, cfg.format, cfg.one_based, cfg.kappa);
    } else {
        throw std::invalid_argument("no input: pass --input or --example");
    }
    if (cfg.target_mu_min) {
        const cs::DenseSymMatrix A = cs::adjacency(p.net);
        const cs::Partition part0 = cs::minimum_balanced_coloring(A);
        p.net.kappa = cs::suggest_kappa(A, part0, *cfg.target_mu_min, cfg.seed);
        cfg.kappa = p.net.kappa;
    }
    p.At = cs::shifted_adjacency(p.net);
    p.part = cs::minimum_balanced_coloring(p.At);
    return p;
}

json owner_json(const cs::Owner& o) {
    return json{{"label", o.label},
                {"is_block", o.is_block},
                {"index", o.index},
                {"clusters", o.clusters}};
}

json interval_json(const cs::SigmaInterval& iv) {
    json windows = json::array();
    for (const auto& [lo, hi] : iv.windows) {
        windows.push_back({{"lo", lo}, {"hi", num_or_null(hi)}});
    }
    return json{{"owner", owner_json(iv.owner)},
                {"empty", iv.empty},
                {"lo", iv.empty ? json(nullptr) : json(iv.lo)},
                {"hi", (iv.empty || !iv.bounded) ? json(nullptr) : json(iv.hi)},
                {"bounded", iv.bounded},
                {"windows", windows},
                {"note", iv.note}};
}

// ---------------------------------------------------------------- coloring
void run_coloring(cs::RunConfig cfg) {
    Pipeline p = load_pipeline(cfg);
    json j;
    j["n_nodes"] = p.net.n_nodes;
    j["edge_count"] = p.net.edge_count();
    j["kappa"] = p.net.kappa;
    j["eps_eq"] = cfg.eps_eq ? *cfg.eps_eq : cs::equitable_tolerance(p.At);
    j["K"] = p.part.K;
    j["K_nontrivial"] = p.part.K_nontrivial;
    j["sizes"] = p.part.sizes;
    j["cluster_of"] = p.part.cluster_of;
    j["clusters"] = p.part.members();
    j["equitable"] = cs::is_equitable(p.At, p.part);
    write_json_file(outpath(cfg, "coloring.json"), j);
    write_manifest(cfg, "coloring", {"coloring.json"});
}

// ---------------------------------------------------------------- spectrum
void run_spectrum(cs::RunConfig cfg) {
    Pipeline p = load_pipeline(cfg);
    const cs::SpectralDecomposition dec = cs::decompose(p.At, p.part, cfg.seed);
    json j;
    j["kappa"] = dec.kappa;
    j["K"] = p.part.K;
    j["lambda_Q"] = dec.lambda_Q;
    json clusters = json::array();
    for (int k = 0; k < p.part.K; ++k) {
        clusters.push_back({{"cluster", k},
                            {"size", p.part.sizes[k]},
                            {"lambda_R", dec.lambda_R[k]},
                            {"mu", dec.mu[k]},
                            {"mu_min", num_or_null(dec.mu_min[k])},
                            {"mu_max", num_or_null(dec.mu_max[k])}});
    }
    j["clusters"] = clusters;
    json blocks = json::array();
    for (const auto& b : dec.blocks) {
        blocks.push_back({{"dim", b.R.rows()},
                          {"support", b.support},
                          {"rows", b.rows},
                          {"eigenvalues", b.eigenvalues}});
    }
    j["blocks"] = blocks;
    j["fully_separated"] = dec.fully_separated();
    j["intertwined"] = cs::detect_intertwined(dec);
    write_json_file(outpath(cfg, "spectrum.json"), j);
    write_manifest(cfg, "spectrum", {"spectrum.json"});
}

// --------------------------------------------------------------------- msf
void run_msf(cs::RunConfig cfg) {
    Pipeline p = load_pipeline(cfg);
    const cs::SpectralDecomposition dec = cs::decompose(p.At, p.part, cfg.seed);
    const cs::StabilityProfile prof =
        cs::stability_profile(dec, cs::van_der_pol(), cfg.grid, cfg.dynamics_params());
    std::ostringstream os;
    os << "sigma";
    for (std::size_t o = 0; o < prof.owners.size(); ++o) os << ",mle_" << (o + 1);
    os << "\n";
    for (const auto& pt : prof.curve) {
        os << fmt(pt.sigma);
        for (double v : pt.mle) os << "," << fmt(v);
        os << "\n";
    }
    write_text(outpath(cfg, "msf.csv"), os.str());
    json j;
    j["owners"] = json::array();
    for (const auto& o : prof.owners) j["owners"].push_back(owner_json(o));
    write_json_file(outpath(cfg, "msf_owners.json"), j);
    write_manifest(cfg, "msf", {"msf.csv", "msf_owners.json"});
}

// --------------------------------------------------------------- intervals
void run_intervals(cs::RunConfig cfg) {
    Pipeline p = load_pipeline(cfg);
    const cs::SpectralDecomposition dec = cs::decompose(p.At, p.part, cfg.seed);
    const cs::StabilityProfile prof =
        cs::stability_profile(dec, cs::van_der_pol(), cfg.grid, cfg.dynamics_params());
    json j;
    j["intervals"] = json::array();
    for (const auto& iv : prof.intervals) j["intervals"].push_back(interval_json(iv));
    write_json_file(outpath(cfg, "intervals.json"), j);
    write_manifest(cfg, "intervals", {"intervals.json"});
}

// ------------------------------------------------------------------- sweep
void run_sweep(cs::RunConfig cfg) {
    Pipeline p = load_pipeline(cfg);
    const cs::SpectralDecomposition dec = cs::decompose(p.At, p.part, cfg.seed);
    const auto rows =
        cs::sweep(p.At, dec, cs::van_der_pol(), cfg.grid, cfg.dynamics_params());
    const auto owners = cs::stability_owners(dec);
    std::ostringstream os;
    os << "sigma";
    for (int k = 0; k < p.part.K; ++k) os << ",E_" << (k + 1);
    for (std::size_t o = 0; o < owners.size(); ++o) os << ",mle_" << (o + 1);
    os << "\n";
    for (const auto& row : rows) {
        os << fmt(row.sigma);
        for (double v : row.E) os << "," << fmt(v);
        for (double v : row.mle) os << "," << fmt(v);
        os << "\n";
    }
    write_text(outpath(cfg, "sweep.csv"), os.str());
    write_manifest(cfg, "sweep", {"sweep.csv"});
}

// ---------------------------------------------------------------- classify
void run_classify(cs::RunConfig cfg) {
    Pipeline p = load_pipeline(cfg);
    const cs::SpectralDecomposition dec = cs::decompose(p.At, p.part, cfg.seed);
    const cs::StabilityProfile prof =
        cs::stability_profile(dec, cs::van_der_pol(), cfg.grid, cfg.dynamics_params());
    std::optional<cs::CompleteSyncIndices> alpha;
    std::string alpha_note;
    try {
        alpha = cs::complete_sync_indices(cs::laplacian(p.net));
    } catch (const std::invalid_argument& e) {
        alpha_note = e.what();
    }
    const cs::CSReport rep = cs::build_report(dec, prof, alpha, cfg.refine_tol);

    json j;
    j["owners"] = json::array();
    for (const auto& o : rep.owners) j["owners"].push_back(owner_json(o));
    j["intervals"] = json::array();
    for (const auto& iv : rep.intervals) j["intervals"].push_back(interval_json(iv));
    j["pairs"] = json::array();
    for (const auto& pc : rep.pairs) {
        j["pairs"].push_back({{"a", pc.a},
                              {"b", pc.b},
                              {"type", cs::to_string(pc.type)},
                              {"inner", pc.inner},
                              {"note", pc.note}});
    }
    j["network_interval"] = {{"empty", rep.net.empty},
                             {"lo", rep.net.empty ? json(nullptr) : json(rep.net.lo)},
                             {"hi", (rep.net.empty || !rep.net.bounded) ? json(nullptr)
                                                                        : json(rep.net.hi)},
                             {"bounded", rep.net.bounded},
                             {"k1", rep.net.k1},
                             {"k2", rep.net.k2}};
    j["rho"] = rep.rho_value ? json(*rep.rho_value) : json(nullptr);
    j["eta_b"] = {{"defined", rep.eta_b_value.defined},
                  {"value", rep.eta_b_value.defined ? json(rep.eta_b_value.value) : json(nullptr)},
                  {"block_level", rep.eta_b_value.block_level},
                  {"note", rep.eta_b_value.note}};
    j["eta_u"] = {{"defined", rep.eta_u_value.defined},
                  {"value", rep.eta_u_value.defined ? json(rep.eta_u_value.value) : json(nullptr)},
                  {"note", rep.eta_u_value.note}};
    j["per_owner"] = json::array();
    for (const auto& oi : rep.per_owner) {
        j["per_owner"].push_back({{"owner", oi.owner.label},
                                  {"eta_b_k", oi.eta_b_k},
                                  {"eta_u_k", oi.eta_u_k},
                                  {"block_level", oi.block_level}});
    }
    if (rep.complete_sync) {
        j["complete_sync"] = {{"alpha_b", rep.complete_sync->alpha_b},
                              {"alpha_u", rep.complete_sync->alpha_u},
                              {"lambda2", rep.complete_sync->lambda2},
                              {"lambdaN", rep.complete_sync->lambdaN}};
    } else {
        j["complete_sync"] = nullptr;
        j["complete_sync_note"] = alpha_note;
    }
    write_json_file(outpath(cfg, "classify.json"), j);
    write_manifest(cfg, "classify", {"classify.json"});
}

// -------------------------------------------------------------------- scan
std::vector<double> parse_values(const std::string& s) {
    std::vector<double> out;
    std::string tok;
    std::istringstream iss(s);
    while (std::getline(iss, tok, ',')) {
        std::istringstream t(tok);
        double v;
        while (t >> v) out.push_back(v);
    }
    return out;
}

void run_scan(cs::RunConfig cfg) {
    const std::vector<double> values = parse_values(cfg.scan_values);
    if (values.empty()) {
        throw std::invalid_argument("scan: pass --scan-values w1,w2,...");
    }
    std::ostringstream os;
    os << "w,sigma_lo,sigma_hi,k1,k2,type,eta_b\n";
    for (double w : values) {
        try {
            cs::Network net;
            if (cfg.scan_param == "w_a") {
                net = cs::two_population_network(w, 3.0, 0.1, cfg.kappa);
            } else if (cfg.scan_param == "w_b") {
                net = cs::two_population_network(2.0, w, 0.1, cfg.kappa);
            } else {
                net = cs::two_population_network(2.0, 3.0, w, cfg.kappa);
            }
            const cs::DenseSymMatrix At = cs::shifted_adjacency(net);
            const cs::Partition part = cs::minimum_balanced_coloring(At);
            const cs::SpectralDecomposition dec = cs::decompose(At, part, cfg.seed);
            const cs::StabilityProfile prof =
                cs::stability_profile(dec, cs::van_der_pol(), cfg.grid, cfg.dynamics_params());
            const cs::NetworkInterval ni = cs::network_interval(prof);
            const cs::PairClassification pc = cs::scan_pair(prof, ni, cfg.refine_tol);
            const cs::EtaResult eb = cs::eta_b(dec, prof, ni);
            os << fmt(w) << ","
               << (ni.empty ? "nan" : fmt(ni.lo)) << ","
               << (ni.empty ? "nan" : (ni.bounded ? fmt(ni.hi) : "inf")) << "," << ni.k1 << ","
               << ni.k2 << "," << cs::to_string(pc.type) << ","
               << (eb.defined ? fmt(eb.value) : "nan") << "\n";
        } catch (const std::exception& e) {
            std::cerr << "scan point w=" << fmt(w) << " failed: " << e.what() << "\n";
            os << fmt(w) << ",nan,nan,-1,-1,error,nan\n";
        }
    }
    write_text(outpath(cfg, "scan.csv"), os.str());
    write_manifest(cfg, "scan", {"scan.csv"});
}

// ----------------------------------------------------------- complete-sync
void run_complete_sync(cs::RunConfig cfg) {
    Pipeline p = load_pipeline(cfg);
    const cs::CompleteSyncIndices idx = cs::complete_sync_indices(cs::laplacian(p.net));
    json j;
    j["lambda2"] = idx.lambda2;
    j["lambdaN"] = idx.lambdaN;
    j["alpha_b"] = idx.alpha_b;
    j["alpha_u"] = idx.alpha_u;
    write_json_file(outpath(cfg, "complete_sync.json"), j);
    write_manifest(cfg, "complete-sync", {"complete_sync.json"});
}

// -------------------------------------------------------- generate-example
void run_generate_example(const std::string& name, const std::string& outdir) {
    cs::ExampleBundle bundle = cs::generate_example(name);
    bundle.config.outdir = outdir.empty() ? "." : outdir;
    std::string stem = name;
    for (char& c : stem) {
        if (c == ':' || c == '(' || c == ')' || c == '=') c = '_';
    }
    const auto edges = outpath(bundle.config, stem + ".edges");
    cs::save_edge_list(bundle.network, edges.string());
    std::cout << "wrote " << edges.string() << "\n";
    bundle.config.input = edges.string();
    bundle.config.example.clear();
    write_text(outpath(bundle.config, stem + ".config"), cs::dump_config(bundle.config));
    write_manifest(bundle.config, "generate-example",
                   {stem + ".edges", stem + ".config"});
}

}  // namespace

int main(int argc, char** argv) {
    try {
        CLI::App app{"cluster-synchronization analysis toolkit"};
        app.require_subcommand(1);

        Flags f;
        struct SubDef {
            const char* name;
            const char* desc;
            void (*fn)(cs::RunConfig);
        };
        const std::vector<SubDef> defs = {
            {"coloring", "minimum balanced coloring (equitable partition)", run_coloring},
            {"spectrum", "quotient/transverse spectra, blocks, intertwined sets", run_spectrum},
            {"msf", "MLE-vs-sigma curves per owner (CSV)", run_msf},
            {"intervals", "stable sigma intervals per owner (JSON)", run_intervals},
            {"sweep", "sync errors E_k and MLEs over the sigma grid (CSV)", run_sweep},
            {"classify", "full cluster-synchronization report (JSON)", run_classify},
            {"scan", "eta_b scan over a coupling-weight family (CSV)", run_scan},
            {"complete-sync", "Laplacian complete-sync indices alpha_b, alpha_u", run_complete_sync},
        };
        for (const auto& d : defs) {
            CLI::App* sub = app.add_subcommand(d.name, d.desc);
            add_common(sub, f);
            sub->callback([sub, &f, fn = d.fn] { fn(resolve_config(sub, f)); });
        }
        std::string gen_name, gen_outdir;
        CLI::App* gen = app.add_subcommand("generate-example", "write a bundled example network");
        gen->add_option("name", gen_name, "example name")->required();
        gen->add_option("--outdir", gen_outdir, "output directory (default .)");
        gen->callback([&] { run_generate_example(gen_name, gen_outdir); });

        CLI11_PARSE(app, argc, argv);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
