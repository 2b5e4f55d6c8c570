#include "clustersync/config.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef CS_VERSION
#define CS_VERSION "0.1.0"
#endif

namespace clustersync {

DynamicsParams RunConfig::dynamics_params() const {
    DynamicsParams p;
    p.integ.dt = dt;
    p.mle.eps_conv = eps_conv;
    p.mle.transient = mle_transient;
    p.mle.horizon = mle_horizon;
    p.chain.settle = settle;
    p.chain.seed = seed;
    p.sim.horizon = horizon;
    p.sim.window_lo = window_lo;
    p.sim.window_hi = window_hi;
    p.sim.delta = delta;
    p.sim.sync_threshold_scale = sync_threshold_scale;
    p.sim.seed = seed;
    p.interval.refine_tol = refine_tol;
    return p;
}

void RunConfig::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0)) {
            throw std::invalid_argument(std::string(what) + " must be positive");
        }
    };
    if (!(grid.lo < grid.hi)) {
        throw std::invalid_argument("sigma grid requires lo < hi");
    }
    positive(grid.step, "sigma_step");
    positive(dt, "dt");
    positive(horizon, "horizon");
    if (!(window_lo >= 0.0 && window_lo < window_hi && window_hi <= horizon)) {
        throw std::invalid_argument("stats window must satisfy 0 <= lo < hi <= horizon");
    }
    if (eps_eq && !(*eps_eq > 0.0)) {
        throw std::invalid_argument("eps_eq must be positive");
    }
    positive(eps_conv, "eps_conv");
    positive(sync_threshold_scale, "sync_threshold");
    positive(refine_tol, "refine_tol");
    positive(delta, "delta");
    positive(mle_horizon, "mle_horizon");
    if (!(mle_transient >= 0.0) || !(settle >= 0.0)) {
        throw std::invalid_argument("mle_transient and settle must be nonnegative");
    }
    if (!(mle_transient < mle_horizon)) {
        throw std::invalid_argument("mle_transient must be below mle_horizon");
    }
    if (target_mu_min && !(*target_mu_min > 0.0)) {
        throw std::invalid_argument("target_mu_min must be positive");
    }
    if (!input.empty() && !example.empty()) {
        throw std::invalid_argument("input and example are mutually exclusive");
    }
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double to_double(const std::string& v, const std::string& key) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse number '" + v + "'");
    }
    if (used != v.size()) {
        throw std::invalid_argument("config key '" + key + "': cannot parse number '" + v + "'");
    }
    return d;
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
    std::size_t used = 0;
    unsigned long long d = 0;
    try {
        d = std::stoull(v, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse integer '" + v + "'");
    }
    if (used != v.size()) {
        throw std::invalid_argument("config key '" + key + "': cannot parse integer '" + v + "'");
    }
    return d;
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config key '" + key + "': cannot parse boolean '" + v + "'");
}

bool apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "input") cfg.input = value;
    else if (key == "format") {
        if (value == "plain") cfg.format = EdgeListFormat::PlainEdgeList;
        else if (value == "matrix-market") cfg.format = EdgeListFormat::MatrixMarket;
        else throw std::invalid_argument("config key 'format': expected plain or matrix-market");
    }
    else if (key == "one_based") cfg.one_based = to_bool(value, key);
    else if (key == "example") cfg.example = value;
    else if (key == "kappa") cfg.kappa = to_double(value, key);
    else if (key == "target_mu_min") cfg.target_mu_min = to_double(value, key);
    else if (key == "sigma_lo") cfg.grid.lo = to_double(value, key);
    else if (key == "sigma_hi") cfg.grid.hi = to_double(value, key);
    else if (key == "sigma_step") cfg.grid.step = to_double(value, key);
    else if (key == "dt") cfg.dt = to_double(value, key);
    else if (key == "horizon") cfg.horizon = to_double(value, key);
    else if (key == "window_lo") cfg.window_lo = to_double(value, key);
    else if (key == "window_hi") cfg.window_hi = to_double(value, key);
    else if (key == "eps_eq") cfg.eps_eq = to_double(value, key);
    else if (key == "eps_conv") cfg.eps_conv = to_double(value, key);
    else if (key == "sync_threshold") cfg.sync_threshold_scale = to_double(value, key);
    else if (key == "refine_tol") cfg.refine_tol = to_double(value, key);
    else if (key == "delta") cfg.delta = to_double(value, key);
    else if (key == "settle") cfg.settle = to_double(value, key);
    else if (key == "mle_transient") cfg.mle_transient = to_double(value, key);
    else if (key == "mle_horizon") cfg.mle_horizon = to_double(value, key);
    else if (key == "seed") cfg.seed = to_u64(value, key);
    else if (key == "outdir") cfg.outdir = value;
    else if (key == "sigma") cfg.sigma = to_double(value, key);
    else if (key == "scan_values") cfg.scan_values = value;
    else if (key == "scan_param") cfg.scan_param = value;
    else return false;
    return true;
}

}  // namespace

std::vector<std::string> load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file '" + path + "'");
    }
    std::vector<std::string> keys;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string s = trim(line);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
        }
        if (!apply_key(cfg, key, value)) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown config key '" + key + "'");
        }
        keys.push_back(key);
    }
    return keys;
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };
    os << "input = " << cfg.input << "\n";
    os << "format = "
       << (cfg.format == EdgeListFormat::PlainEdgeList ? "plain" : "matrix-market") << "\n";
    os << "one_based = " << (cfg.one_based ? "true" : "false") << "\n";
    os << "example = " << cfg.example << "\n";
    os << "kappa = " << num(cfg.kappa) << "\n";
    if (cfg.target_mu_min) os << "target_mu_min = " << num(*cfg.target_mu_min) << "\n";
    os << "sigma_lo = " << num(cfg.grid.lo) << "\n";
    os << "sigma_hi = " << num(cfg.grid.hi) << "\n";
    os << "sigma_step = " << num(cfg.grid.step) << "\n";
    os << "dt = " << num(cfg.dt) << "\n";
    os << "horizon = " << num(cfg.horizon) << "\n";
    os << "window_lo = " << num(cfg.window_lo) << "\n";
    os << "window_hi = " << num(cfg.window_hi) << "\n";
    if (cfg.eps_eq) os << "eps_eq = " << num(*cfg.eps_eq) << "\n";
    os << "eps_conv = " << num(cfg.eps_conv) << "\n";
    os << "sync_threshold = " << num(cfg.sync_threshold_scale) << "\n";
    os << "refine_tol = " << num(cfg.refine_tol) << "\n";
    os << "delta = " << num(cfg.delta) << "\n";
    os << "settle = " << num(cfg.settle) << "\n";
    os << "mle_transient = " << num(cfg.mle_transient) << "\n";
    os << "mle_horizon = " << num(cfg.mle_horizon) << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "outdir = " << cfg.outdir << "\n";
    os << "sigma = " << num(cfg.sigma) << "\n";
    if (!cfg.scan_values.empty()) os << "scan_values = " << cfg.scan_values << "\n";
    os << "scan_param = " << cfg.scan_param << "\n";
    return os.str();
}

std::string file_checksum_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot open '" + path + "' for checksum");
    }
    std::uint64_t h = 14695981039346656037ULL;  // FNV-1a 64-bit
    char chunk[4096];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(chunk[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string library_version() { return CS_VERSION; }

}  // namespace clustersync
