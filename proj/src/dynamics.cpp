#include "clustersync/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace clustersync {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_sigma(double s) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", s);
    return buf;
}

// Inlined Van der Pol fast path; the generic path forwards to the model's
// callbacks. Both are used through the same templated kernels.
struct VdpOps {
    int dim() const { return 2; }
    void F(const double* x, double* o) const {
        o[0] = x[1];
        o[1] = -x[0] + 3.0 * (1.0 - x[0] * x[0]) * x[1];
    }
    void H(const double* x, double* o) const {
        o[0] = 0.0;
        o[1] = x[1];
    }
    void DF(const double* x, double* o) const {
        o[0] = 0.0;
        o[1] = 1.0;
        o[2] = -1.0 - 6.0 * x[0] * x[1];
        o[3] = 3.0 * (1.0 - x[0] * x[0]);
    }
    void DH(const double*, double* o) const {
        o[0] = 0.0;
        o[1] = 0.0;
        o[2] = 0.0;
        o[3] = 1.0;
    }
};

struct GenericOps {
    const OscillatorModel* model;
    int dim() const { return model->dim; }
    void F(const double* x, double* o) const { model->F(x, o); }
    void H(const double* x, double* o) const { model->H(x, o); }
    void DF(const double* x, double* o) const { model->DF(x, o); }
    void DH(const double* x, double* o) const { model->DH(x, o); }
};

void check_model(const OscillatorModel& model) {
    if (model.dim <= 0 || !model.F || !model.H) {
        throw std::invalid_argument("OscillatorModel: dim, F, and H are required");
    }
}

template <class Fn>
auto with_ops(const OscillatorModel& model, Fn&& fn) {
    check_model(model);
    if (model.name == "vdp" && model.dim == 2) {
        return fn(VdpOps{});
    }
    return fn(GenericOps{&model});
}

// dx_i = F(x_i) + sigma * sum_j C_ij H(x_j); C row-major n x n or null.
template <class Ops>
inline void coupled_rhs(const Ops& ops, int n, const double* C, double sigma, const double* x,
                        double* dx, double* hbuf) {
    const int m = ops.dim();
    for (int i = 0; i < n; ++i) ops.F(x + i * m, dx + i * m);
    if (!C || sigma == 0.0) return;
    for (int j = 0; j < n; ++j) ops.H(x + j * m, hbuf + j * m);
    for (int i = 0; i < n; ++i) {
        double* di = dx + i * m;
        const double* Ci = C + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double c = Ci[j];
            if (c == 0.0) continue;
            const double sc = sigma * c;
            const double* hj = hbuf + j * m;
            for (int t = 0; t < m; ++t) di[t] += sc * hj[t];
        }
    }
}

struct Rk4Buffers {
    std::vector<double> k1, k2, k3, k4, xs, h;
    void resize(std::size_t dimtot, std::size_t hdim) {
        k1.assign(dimtot, 0.0);
        k2.assign(dimtot, 0.0);
        k3.assign(dimtot, 0.0);
        k4.assign(dimtot, 0.0);
        xs.assign(dimtot, 0.0);
        h.assign(hdim, 0.0);
    }
};

inline bool within_guard(const double* x, std::size_t n, double guard) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(x[i]) <= guard)) return false;  // catches NaN too
    }
    return true;
}

// Classical RK4 over `steps` fixed steps. `cb(step_index, x)` runs after
// each accepted step. Returns false on divergence (x left at last finite
// accepted value).
template <class Ops, class Cb>
bool rk4_integrate(const Ops& ops, int n, const double* C, double sigma, double dt,
                   long long steps, double guard, double* x, Rk4Buffers& buf, Cb&& cb) {
    const int m = ops.dim();
    const std::size_t D = static_cast<std::size_t>(n) * m;
    buf.resize(D, D);
    double* k1 = buf.k1.data();
    double* k2 = buf.k2.data();
    double* k3 = buf.k3.data();
    double* k4 = buf.k4.data();
    double* xs = buf.xs.data();
    double* hb = buf.h.data();
    for (long long s = 0; s < steps; ++s) {
        coupled_rhs(ops, n, C, sigma, x, k1, hb);
        for (std::size_t i = 0; i < D; ++i) xs[i] = x[i] + 0.5 * dt * k1[i];
        coupled_rhs(ops, n, C, sigma, xs, k2, hb);
        for (std::size_t i = 0; i < D; ++i) xs[i] = x[i] + 0.5 * dt * k2[i];
        coupled_rhs(ops, n, C, sigma, xs, k3, hb);
        for (std::size_t i = 0; i < D; ++i) xs[i] = x[i] + dt * k3[i];
        coupled_rhs(ops, n, C, sigma, xs, k4, hb);
        const double w = dt / 6.0;
        for (std::size_t i = 0; i < D; ++i) {
            x[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (!within_guard(x, D, guard)) return false;
        cb(s, x);
    }
    return true;
}

struct NoStep {
    void operator()(long long, const double*) const {}
};

std::vector<double> row_major(const Eigen::MatrixXd& M) {
    std::vector<double> out(static_cast<std::size_t>(M.rows()) * M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            out[static_cast<std::size_t>(i) * M.cols() + j] = M(i, j);
        }
    }
    return out;
}

long long steps_for(double span, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(span >= 0.0)) throw std::invalid_argument("negative time span");
    return std::llround(span / dt);
}

}  // namespace

OscillatorModel van_der_pol() {
    OscillatorModel m;
    m.dim = 2;
    m.name = "vdp";
    m.F = [](const double* x, double* o) {
        o[0] = x[1];
        o[1] = -x[0] + 3.0 * (1.0 - x[0] * x[0]) * x[1];
    };
    m.H = [](const double* x, double* o) {
        o[0] = 0.0;
        o[1] = x[1];
    };
    m.DF = [](const double* x, double* o) {
        o[0] = 0.0;
        o[1] = 1.0;
        o[2] = -1.0 - 6.0 * x[0] * x[1];
        o[3] = 3.0 * (1.0 - x[0] * x[0]);
    };
    m.DH = [](const double*, double* o) {
        o[0] = 0.0;
        o[1] = 0.0;
        o[2] = 0.0;
        o[3] = 1.0;
    };
    return m;
}

std::vector<double> SigmaGrid::points() const {
    if (!(step > 0.0) || !(lo <= hi)) {
        throw std::invalid_argument("SigmaGrid: requires lo <= hi and step > 0");
    }
    std::vector<double> pts;
    const long long n = std::llround((hi - lo) / step);
    for (long long i = 0; i <= n; ++i) {
        const double s = lo + static_cast<double>(i) * step;
        if (s > hi + 0.5 * step) break;
        pts.push_back(s);
    }
    return pts;
}

Trajectory integrate(const OscillatorModel& model, const Eigen::MatrixXd& coupling, double sigma,
                     const Eigen::VectorXd& ic, double t0, double t1,
                     const IntegratorParams& ip) {
    check_model(model);
    const int m = model.dim;
    if (ic.size() == 0 || ic.size() % m != 0) {
        throw std::invalid_argument("integrate: ic size must be a positive multiple of model.dim");
    }
    const int n = static_cast<int>(ic.size() / m);
    if (coupling.size() != 0 && (coupling.rows() != n || coupling.cols() != n)) {
        throw std::invalid_argument("integrate: coupling must be n x n (n units) or empty");
    }
    if (!ic.allFinite()) {
        throw std::invalid_argument("integrate: ic must be finite");
    }
    if (t1 < t0) {
        throw std::invalid_argument("integrate: t1 < t0");
    }
    const long long steps = steps_for(t1 - t0, ip.dt);
    const std::vector<double> C = coupling.size() ? row_major(coupling) : std::vector<double>{};

    Trajectory out;
    out.dt = ip.dt;
    out.times.reserve(steps + 1);
    out.states.reserve(steps + 1);
    out.times.push_back(t0);
    out.states.push_back(ic);

    std::vector<double> x(ic.data(), ic.data() + ic.size());
    Rk4Buffers buf;
    const bool ok = with_ops(model, [&](auto ops) {
        return rk4_integrate(ops, n, C.empty() ? nullptr : C.data(), sigma, ip.dt, steps,
                             ip.divergence_guard, x.data(), buf,
                             [&](long long s, const double* xv) {
                                 out.times.push_back(t0 + (s + 1) * ip.dt);
                                 out.states.push_back(
                                     Eigen::Map<const Eigen::VectorXd>(xv, ic.size()));
                             });
    });
    out.diverged = !ok;
    return out;
}

QuotientChain::QuotientChain(Eigen::MatrixXd Qt, const OscillatorModel& model,
                             const IntegratorParams& ip, const ChainParams& cp)
    : Qt_(std::move(Qt)), model_(model), ip_(ip), cp_(cp) {
    check_model(model_);
    if (Qt_.rows() != Qt_.cols() || Qt_.rows() < 1) {
        throw std::invalid_argument("QuotientChain: quotient matrix must be square");
    }
}

const Eigen::VectorXd& QuotientChain::advance_to(double sigma) {
    const int K = static_cast<int>(Qt_.rows());
    const int m = model_.dim;
    Rk4Buffers buf;
    if (!started_) {
        // Warm a single uncoupled unit onto its attractor, then pick a
        // seeded random phase along it.
        std::mt19937_64 rng(cp_.seed + 0x9E3779B97F4A7C15ULL * draws_);
        ++draws_;
        std::vector<double> u(m, 0.1);
        const long long warm = steps_for(cp_.uncoupled_warmup, ip_.dt);
        bool ok = with_ops(model_, [&](auto ops) {
            return rk4_integrate(ops, 1, nullptr, 0.0, ip_.dt, warm, ip_.divergence_guard,
                                 u.data(), buf, NoStep{});
        });
        if (ok) {
            const double phase = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
            const long long extra = steps_for(phase, ip_.dt);
            ok = with_ops(model_, [&](auto ops) {
                return rk4_integrate(ops, 1, nullptr, 0.0, ip_.dt, extra, ip_.divergence_guard,
                                     u.data(), buf, NoStep{});
            });
        }
        if (!ok) {
            throw Divergence("uncoupled model diverged during attractor warmup");
        }
        state_.resize(K * m);
        for (int k = 0; k < K; ++k) {
            for (int t = 0; t < m; ++t) state_[k * m + t] = u[t];
        }
        started_ = true;
    }
    // Settle at this sigma from the continuation state.
    const std::vector<double> C = row_major(Qt_);
    std::vector<double> x(state_.data(), state_.data() + state_.size());
    const long long steps = steps_for(cp_.settle, ip_.dt);
    const bool ok = with_ops(model_, [&](auto ops) {
        return rk4_integrate(ops, K, C.data(), sigma, ip_.dt, steps, ip_.divergence_guard,
                             x.data(), buf, NoStep{});
    });
    if (!ok) {
        started_ = false;  // restart from a fresh attractor phase next time
        throw Divergence("no coherent cluster state at sigma=" + fmt_sigma(sigma) +
                         " (quotient flow diverged)");
    }
    state_ = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    return state_;
}

QuotientTrajectory QuotientChain::trajectory(double sigma, double record) {
    advance_to(sigma);
    QuotientTrajectory out;
    out.sigma = sigma;
    out.traj = integrate(model_, Qt_, sigma, state_, 0.0, record, ip_);
    if (out.traj.diverged) {
        started_ = false;
        throw Divergence("no coherent cluster state at sigma=" + fmt_sigma(sigma) +
                         " (quotient flow diverged while recording)");
    }
    state_ = out.traj.states.back();
    return out;
}

TangentSpec scalar_tangent(int cluster, double mu) {
    TangentSpec spec;
    spec.d = 1;
    TangentSpec::Term term;
    term.cluster = cluster;
    term.P = Eigen::MatrixXd::Ones(1, 1);
    term.G = -mu * Eigen::MatrixXd::Ones(1, 1);
    spec.terms.push_back(std::move(term));
    return spec;
}

TangentSpec block_tangent(const SpectralDecomposition& d, int block) {
    if (block < 0 || block >= static_cast<int>(d.blocks.size())) {
        throw std::invalid_argument("block_tangent: block index out of range");
    }
    const TransverseBlock& blk = d.blocks[block];
    const int dd = static_cast<int>(blk.R.rows());
    const int K = d.partition.K;
    TangentSpec spec;
    spec.d = dd;
    if (dd == 1 && blk.support.size() == 1) {
        // Exact scalar reduction: the projected indicator is the 1x1
        // identity, so this is the same arithmetic path as scalar_tangent.
        TangentSpec::Term term;
        term.cluster = blk.support.front();
        term.P = Eigen::MatrixXd::Ones(1, 1);
        term.G = blk.R;
        spec.terms.push_back(std::move(term));
        return spec;
    }
    for (int k : blk.support) {
        TangentSpec::Term term;
        term.cluster = k;
        term.P = Eigen::MatrixXd::Zero(dd, dd);
        for (int a = 0; a < dd; ++a) {
            for (int b = 0; b < dd; ++b) {
                double acc = 0.0;
                for (int node = 0; node < d.partition.n_nodes(); ++node) {
                    if (d.partition.cluster_of[node] != k) continue;
                    acc += d.T(K + blk.rows[a], node) * d.T(K + blk.rows[b], node);
                }
                term.P(a, b) = acc;
            }
        }
        term.G = blk.R * term.P;
        spec.terms.push_back(std::move(term));
    }
    return spec;
}

namespace {

// Benettin bookkeeping for one tangent system.
struct TangentState {
    const TangentSpec* spec = nullptr;
    int offset = 0;  // into the tangent portion of the augmented vector
    int size = 0;    // d * m
    double accum = 0.0;
    std::vector<double> tail;
    bool converged = false;
    double value = kNaN;
    bool has_value = false;
};

// Augmented quotient + tangents right-hand side.
template <class Ops>
void augmented_rhs(const Ops& ops, int K, const double* Qt, double sigma, const double* z,
                   double* dz, double* hbuf, double* jf, double* jh, double* scratch,
                   const std::vector<TangentState>& tangents, int tangent_base) {
    const int m = ops.dim();
    coupled_rhs(ops, K, Qt, sigma, z, dz, hbuf);
    // Per-cluster Jacobians at the current stage state.
    for (int k = 0; k < K; ++k) {
        ops.DF(z + k * m, jf + k * m * m);
        ops.DH(z + k * m, jh + k * m * m);
    }
    for (const TangentState& ts : tangents) {
        const TangentSpec& spec = *ts.spec;
        const int d = spec.d;
        const double* y = z + tangent_base + ts.offset;
        double* dy = dz + tangent_base + ts.offset;
        for (int i = 0; i < ts.size; ++i) dy[i] = 0.0;
        for (const auto& term : spec.terms) {
            const double* F = jf + term.cluster * m * m;
            const double* Hm = jh + term.cluster * m * m;
            for (int c = 0; c < d; ++c) {
                const double* yc = y + c * m;
                // w = DF(s_k) y_c, v = DH(s_k) y_c
                double* wp = scratch;
                double* vp = scratch + m;
                for (int r = 0; r < m; ++r) {
                    double aw = 0.0, av = 0.0;
                    const double* Fr = F + r * m;
                    const double* Hr = Hm + r * m;
                    for (int t = 0; t < m; ++t) {
                        aw += Fr[t] * yc[t];
                        av += Hr[t] * yc[t];
                    }
                    wp[r] = aw;
                    vp[r] = av;
                }
                for (int r = 0; r < d; ++r) {
                    const double p = term.P(r, c);
                    const double g = sigma * term.G(r, c);
                    if (p == 0.0 && g == 0.0) continue;
                    double* dyr = dy + r * m;
                    for (int t = 0; t < m; ++t) dyr[t] += p * wp[t] + g * vp[t];
                }
            }
        }
    }
}

template <class Ops>
std::vector<MLEResult> mle_batch_impl(const Ops& ops, const Eigen::MatrixXd& Qt,
                                      const Eigen::VectorXd& state0, double sigma,
                                      const std::vector<TangentSpec>& specs,
                                      const IntegratorParams& ip, const MleParams& mp) {
    const int m = ops.dim();
    const int K = static_cast<int>(Qt.rows());
    if (state0.size() != static_cast<Eigen::Index>(K) * m) {
        throw std::invalid_argument("mle_batch: state size must be K * model.dim");
    }
    const std::vector<double> C = row_major(Qt);
    const int qdim = K * m;

    std::vector<TangentState> tangents(specs.size());
    int tsize = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (specs[i].d < 1 || specs[i].terms.empty()) {
            throw std::invalid_argument("mle_batch: malformed tangent spec");
        }
        for (const auto& term : specs[i].terms) {
            if (term.cluster < 0 || term.cluster >= K || term.P.rows() != specs[i].d ||
                term.P.cols() != specs[i].d || term.G.rows() != specs[i].d ||
                term.G.cols() != specs[i].d) {
                throw std::invalid_argument("mle_batch: malformed tangent term");
            }
        }
        tangents[i].spec = &specs[i];
        tangents[i].offset = tsize;
        tangents[i].size = specs[i].d * m;
        tsize += tangents[i].size;
    }
    const int D = qdim + tsize;

    // Augmented state: settled quotient state plus unit tangents.
    std::vector<double> z(D, 0.0);
    for (int i = 0; i < qdim; ++i) z[i] = state0[i];
    for (const TangentState& ts : tangents) {
        const double v = 1.0 / std::sqrt(static_cast<double>(ts.size));
        for (int i = 0; i < ts.size; ++i) z[qdim + ts.offset + i] = v;
    }

    std::vector<double> k1(D), k2(D), k3(D), k4(D), zs(D);
    std::vector<double> hbuf(qdim), jf(K * m * m), jh(K * m * m), scratch(2 * m);

    const long long total_steps = steps_for(mp.horizon, ip.dt);
    const long long renorm_every = std::max<long long>(1, std::llround(mp.renorm / ip.dt));
    const double dt = ip.dt;

    auto rhs = [&](const double* in, double* out) {
        augmented_rhs(ops, K, C.data(), sigma, in, out, hbuf.data(), jf.data(), jh.data(),
                      scratch.data(), tangents, qdim);
    };

    long long step = 0;
    bool all_converged = false;
    while (step < total_steps && !all_converged) {
        rhs(z.data(), k1.data());
        for (int i = 0; i < D; ++i) zs[i] = z[i] + 0.5 * dt * k1[i];
        rhs(zs.data(), k2.data());
        for (int i = 0; i < D; ++i) zs[i] = z[i] + 0.5 * dt * k2[i];
        rhs(zs.data(), k3.data());
        for (int i = 0; i < D; ++i) zs[i] = z[i] + dt * k3[i];
        rhs(zs.data(), k4.data());
        const double w = dt / 6.0;
        for (int i = 0; i < D; ++i) z[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        ++step;
        if (!within_guard(z.data(), static_cast<std::size_t>(qdim), ip.divergence_guard)) {
            throw Divergence("quotient flow diverged during MLE integration at sigma=" +
                             fmt_sigma(sigma));
        }
        if (step % renorm_every == 0) {
            const double t = static_cast<double>(step) * dt;
            all_converged = true;
            for (TangentState& ts : tangents) {
                double* y = z.data() + qdim + ts.offset;
                double norm2 = 0.0;
                for (int i = 0; i < ts.size; ++i) norm2 += y[i] * y[i];
                double norm = std::sqrt(norm2);
                if (!(norm > 0.0) || !std::isfinite(norm)) {
                    // Degenerate tangent: reset direction, skip the sample.
                    const double v = 1.0 / std::sqrt(static_cast<double>(ts.size));
                    for (int i = 0; i < ts.size; ++i) y[i] = v;
                    all_converged = false;
                    continue;
                }
                const double inv = 1.0 / norm;
                for (int i = 0; i < ts.size; ++i) y[i] *= inv;
                if (t > mp.transient) {
                    ts.accum += std::log(norm);
                    const double est = ts.accum / (t - mp.transient);
                    ts.value = est;
                    ts.has_value = true;
                    ts.tail.push_back(est);
                    if (static_cast<int>(ts.tail.size()) > mp.tail) {
                        ts.tail.erase(ts.tail.begin());
                    }
                    if (static_cast<int>(ts.tail.size()) == mp.tail) {
                        const auto [mn, mx] = std::minmax_element(ts.tail.begin(), ts.tail.end());
                        ts.converged = (*mx - *mn) < mp.eps_conv;
                    }
                }
                if (!ts.converged) all_converged = false;
            }
        }
    }

    std::vector<MLEResult> out(tangents.size());
    for (std::size_t i = 0; i < tangents.size(); ++i) {
        out[i].value = tangents[i].value;
        out[i].converged = tangents[i].converged;
        out[i].window_estimates = tangents[i].tail;
        if (!tangents[i].has_value) {
            out[i].value = kNaN;
            out[i].converged = false;
        }
    }
    return out;
}

}  // namespace

std::vector<MLEResult> mle_batch(const Eigen::MatrixXd& Qt, const OscillatorModel& model,
                                 const Eigen::VectorXd& state0, double sigma,
                                 const std::vector<TangentSpec>& specs,
                                 const IntegratorParams& ip, const MleParams& mp) {
    return with_ops(model, [&](auto ops) {
        return mle_batch_impl(ops, Qt, state0, sigma, specs, ip, mp);
    });
}

MLEResult transverse_mle(const Eigen::MatrixXd& Qt, const OscillatorModel& model,
                         const Eigen::VectorXd& state0, double sigma, int cluster, double mu,
                         const IntegratorParams& ip, const MleParams& mp) {
    if (mu < 0.0) {
        throw std::invalid_argument("transverse_mle: mu must be nonnegative");
    }
    return mle_batch(Qt, model, state0, sigma, {scalar_tangent(cluster, mu)}, ip, mp)[0];
}

MLEResult block_mle(const SpectralDecomposition& d, const OscillatorModel& model,
                    const Eigen::VectorXd& state0, double sigma, int block,
                    const IntegratorParams& ip, const MleParams& mp) {
    return mle_batch(d.Qdyn, model, state0, sigma, {block_tangent(d, block)}, ip, mp)[0];
}

std::vector<Owner> stability_owners(const SpectralDecomposition& d) {
    std::vector<Owner> out;
    for (int k = 0; k < d.partition.K; ++k) {
        if (d.mu[k].empty()) continue;
        Owner o;
        o.is_block = false;
        o.index = k;
        o.label = "cluster:" + std::to_string(k);
        o.clusters = {k};
        out.push_back(std::move(o));
    }
    for (std::size_t l = 0; l < d.blocks.size(); ++l) {
        if (d.blocks[l].support.size() < 2) continue;
        Owner o;
        o.is_block = true;
        o.index = static_cast<int>(l);
        o.label = "block:" + std::to_string(l);
        o.clusters = d.blocks[l].support;
        out.push_back(std::move(o));
    }
    return out;
}

namespace {

// Distinct mu values of a cluster (duplicates within relative 1e-9 merged).
std::vector<double> distinct_mus(const std::vector<double>& mus) {
    std::vector<double> out;
    for (double mu : mus) {
        if (!out.empty() && std::abs(mu - out.back()) <= 1e-9 * std::max(1.0, std::abs(mu))) {
            continue;
        }
        out.push_back(mu);
    }
    return out;
}

std::vector<TangentSpec> owner_specs(const SpectralDecomposition& d, const Owner& owner) {
    std::vector<TangentSpec> specs;
    if (owner.is_block) {
        specs.push_back(block_tangent(d, owner.index));
    } else {
        for (double mu : distinct_mus(d.mu[owner.index])) {
            specs.push_back(scalar_tangent(owner.index, mu));
        }
    }
    return specs;
}

struct OwnerEval {
    double mle = kNaN;
    bool converged = false;
};

// Max MLE over an owner's tangent specs at one settled state.
OwnerEval eval_owner(const Eigen::MatrixXd& Qt, const OscillatorModel& model,
                     const Eigen::VectorXd& state, double sigma,
                     const std::vector<TangentSpec>& specs, const IntegratorParams& ip,
                     const MleParams& mp) {
    const auto res = mle_batch(Qt, model, state, sigma, specs, ip, mp);
    OwnerEval ev;
    ev.mle = -kInf;
    ev.converged = true;
    for (const auto& r : res) {
        if (std::isnan(r.value)) {
            ev.mle = kNaN;
            ev.converged = false;
            return ev;
        }
        ev.mle = std::max(ev.mle, r.value);
        ev.converged = ev.converged && r.converged;
    }
    return ev;
}

// Settles `settle` units at sigma from a given start state (stand-alone,
// no chain bookkeeping). Returns false on divergence.
bool settle_at(const Eigen::MatrixXd& Qt, const OscillatorModel& model, double sigma,
               double settle, const IntegratorParams& ip, Eigen::VectorXd& state) {
    const std::vector<double> C = row_major(Qt);
    std::vector<double> x(state.data(), state.data() + state.size());
    Rk4Buffers buf;
    const long long steps = steps_for(settle, ip.dt);
    const bool ok = with_ops(model, [&](auto ops) {
        return rk4_integrate(ops, static_cast<int>(Qt.rows()), C.data(), sigma, ip.dt, steps,
                             ip.divergence_guard, x.data(), buf, NoStep{});
    });
    if (ok) {
        state = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    }
    return ok;
}

// True iff the owner is stable (max MLE < 0) at sigma, settling first from
// `from_state`; on success `settled` holds the settled state.
bool stable_at(const Eigen::MatrixXd& Qt, const OscillatorModel& model, double sigma,
               const Eigen::VectorXd& from_state, const std::vector<TangentSpec>& specs,
               const DynamicsParams& p, Eigen::VectorXd& settled) {
    settled = from_state;
    if (!settle_at(Qt, model, sigma, p.chain.settle, p.integ, settled)) return false;
    try {
        const OwnerEval ev = eval_owner(Qt, model, settled, sigma, specs, p.integ, p.mle);
        return std::isfinite(ev.mle) && ev.mle < 0.0;
    } catch (const Divergence&) {
        return false;
    }
}

// Bisects a stability boundary between sig_stable and sig_unstable
// (either order) starting each probe from the stable-side settled state.
double refine_boundary(const Eigen::MatrixXd& Qt, const OscillatorModel& model,
                       double sig_stable, double sig_unstable, Eigen::VectorXd stable_state,
                       const std::vector<TangentSpec>& specs, const DynamicsParams& p) {
    while (std::abs(sig_unstable - sig_stable) > p.interval.refine_tol) {
        const double mid = 0.5 * (sig_stable + sig_unstable);
        Eigen::VectorXd settled;
        if (stable_at(Qt, model, mid, stable_state, specs, p, settled)) {
            sig_stable = mid;
            stable_state = std::move(settled);
        } else {
            sig_unstable = mid;
        }
    }
    return 0.5 * (sig_stable + sig_unstable);
}

}  // namespace

StabilityProfile stability_profile(const SpectralDecomposition& d, const OscillatorModel& model,
                                   const SigmaGrid& grid, const DynamicsParams& params) {
    StabilityProfile prof;
    prof.owners = stability_owners(d);
    if (prof.owners.empty()) {
        throw std::invalid_argument("stability_profile: no transverse owners");
    }
    const Eigen::MatrixXd& Qt = d.Qdyn;
    const std::vector<double> sigmas = grid.points();
    if (sigmas.empty()) return prof;

    // Flat spec list with per-owner ranges so one quotient integration
    // serves every owner at each sigma.
    std::vector<std::vector<TangentSpec>> specs_by_owner;
    std::vector<TangentSpec> flat;
    std::vector<std::pair<int, int>> range;  // [begin, end) into flat
    for (const Owner& o : prof.owners) {
        auto specs = owner_specs(d, o);
        range.emplace_back(static_cast<int>(flat.size()),
                           static_cast<int>(flat.size() + specs.size()));
        flat.insert(flat.end(), specs.begin(), specs.end());
        specs_by_owner.push_back(std::move(specs));
    }

    QuotientChain chain(Qt, model, params.integ, params.chain);
    const int n_owners = static_cast<int>(prof.owners.size());
    std::vector<Eigen::VectorXd> settled_states(sigmas.size());

    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        StabilityCurvePoint pt;
        pt.sigma = sigmas[i];
        pt.mle.assign(n_owners, kNaN);
        pt.converged.assign(n_owners, false);
        try {
            const Eigen::VectorXd& st = chain.advance_to(sigmas[i]);
            settled_states[i] = st;
            const auto res = mle_batch(Qt, model, st, sigmas[i], flat, params.integ, params.mle);
            for (int o = 0; o < n_owners; ++o) {
                double mx = -kInf;
                bool conv = true;
                bool bad = false;
                for (int s = range[o].first; s < range[o].second; ++s) {
                    if (std::isnan(res[s].value)) {
                        bad = true;
                        break;
                    }
                    mx = std::max(mx, res[s].value);
                    conv = conv && res[s].converged;
                }
                if (!bad) {
                    pt.mle[o] = mx;
                    pt.converged[o] = conv;
                }
            }
        } catch (const Divergence&) {
            pt.quotient_diverged = true;
        }
        prof.curve.push_back(std::move(pt));
    }

    // Per-owner stable windows with bisection-refined boundaries.
    const std::size_t npts = sigmas.size();
    for (int o = 0; o < n_owners; ++o) {
        SigmaInterval out;
        out.owner = prof.owners[o];
        auto stable_idx = [&](std::size_t i) {
            const auto& pt = prof.curve[i];
            return !pt.quotient_diverged && std::isfinite(pt.mle[o]) && pt.mle[o] < 0.0;
        };
        std::vector<std::string> window_notes;
        std::size_t i = 0;
        while (i < npts) {
            if (!stable_idx(i)) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 < npts && stable_idx(j + 1)) ++j;
            // Refine the window [sigmas[i], sigmas[j]].
            double lo, hi;
            std::string note;
            if (i == 0) {
                // Stable at the grid floor: probe down toward zero (the
                // neutral exponent at sigma=0 is not a stable point).
                lo = refine_boundary(Qt, model, sigmas[0], 0.0, settled_states[0],
                                     specs_by_owner[o], params);
            } else {
                lo = refine_boundary(Qt, model, sigmas[i], sigmas[i - 1], settled_states[i],
                                     specs_by_owner[o], params);
            }
            if (j + 1 < npts) {
                hi = refine_boundary(Qt, model, sigmas[j], sigmas[j + 1], settled_states[j],
                                     specs_by_owner[o], params);
            } else if (prof.curve[j].mle[o] < -params.interval.unbounded_margin) {
                hi = kInf;  // stable with margin at the grid top
            } else {
                hi = sigmas[j];
                note = "bounded within scan range";
            }
            out.windows.emplace_back(lo, hi);
            window_notes.push_back(note);
            i = j + 1;
        }
        out.empty = out.windows.empty();
        if (out.empty) {
            out.note = "no stable sigma found on the grid";
        } else {
            std::size_t best = 0;
            for (std::size_t w = 1; w < out.windows.size(); ++w) {
                const auto width = [&](std::size_t idx) {
                    return out.windows[idx].second - out.windows[idx].first;
                };
                if (width(w) > width(best)) best = w;
            }
            out.lo = out.windows[best].first;
            out.hi = out.windows[best].second;
            out.bounded = std::isfinite(out.hi);
            out.note = window_notes[best];
            if (out.windows.size() > 1 && !out.note.empty()) {
                out.note += "; multiple stable windows";
            } else if (out.windows.size() > 1) {
                out.note = "multiple stable windows";
            }
        }
        prof.intervals.push_back(std::move(out));
    }
    return prof;
}

SigmaInterval sigma_interval(const SpectralDecomposition& d, const OscillatorModel& model,
                             int owner_index, const SigmaGrid& grid,
                             const DynamicsParams& params) {
    const StabilityProfile prof = stability_profile(d, model, grid, params);
    if (owner_index < 0 || owner_index >= static_cast<int>(prof.intervals.size())) {
        throw std::invalid_argument("sigma_interval: owner index out of range");
    }
    return prof.intervals[owner_index];
}

SyncErrorResult simulate_network(const DenseSymMatrix& At, const Partition& p,
                                 const OscillatorModel& model, double sigma,
                                 const Eigen::VectorXd& chain_state, const IntegratorParams& ip,
                                 const SimParams& sp) {
    check_model(model);
    const int n = At.order();
    const int m = model.dim;
    const int K = p.K;
    if (p.n_nodes() != n) {
        throw std::invalid_argument("simulate_network: partition/matrix size mismatch");
    }
    if (chain_state.size() != static_cast<Eigen::Index>(K) * m) {
        throw std::invalid_argument("simulate_network: chain state must be K * model.dim");
    }
    if (!(sp.window_lo >= 0.0) || !(sp.window_hi <= sp.horizon) || !(sp.window_lo < sp.window_hi)) {
        throw std::invalid_argument("simulate_network: need 0 <= window_lo < window_hi <= horizon");
    }

    // Cluster-synchronous start point plus random-sign perturbations.
    std::mt19937_64 rng(sp.seed);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<double> x(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        const int k = p.cluster_of[i];
        for (int t = 0; t < m; ++t) {
            const double sign = coin(rng) ? 1.0 : -1.0;
            x[static_cast<std::size_t>(i) * m + t] = chain_state[k * m + t] + sign * sp.delta;
        }
    }

    const auto groups = p.members();
    std::vector<int> ref(K);
    for (int k = 0; k < K; ++k) ref[k] = groups[k].front();

    const std::vector<double> C = row_major(At.mat());
    const long long total = steps_for(sp.horizon, ip.dt);
    const long long w_lo = std::llround(sp.window_lo / ip.dt);
    const long long w_hi = std::llround(sp.window_hi / ip.dt);

    std::vector<double> acc(K, 0.0);
    long long samples = 0;
    Rk4Buffers buf;
    const bool ok = with_ops(model, [&](auto ops) {
        return rk4_integrate(ops, n, C.data(), sigma, ip.dt, total, ip.divergence_guard, x.data(),
                             buf, [&](long long s, const double* xv) {
                                 const long long t = s + 1;
                                 if (t < w_lo || t > w_hi) return;
                                 ++samples;
                                 for (int k = 0; k < K; ++k) {
                                     const double* xr = xv + static_cast<std::size_t>(ref[k]) * m;
                                     double sum = 0.0;
                                     for (int node : groups[k]) {
                                         const double* xi =
                                             xv + static_cast<std::size_t>(node) * m;
                                         double d2 = 0.0;
                                         for (int t2 = 0; t2 < m; ++t2) {
                                             const double diff = xi[t2] - xr[t2];
                                             d2 += diff * diff;
                                         }
                                         sum += std::sqrt(d2);
                                     }
                                     acc[k] += sum;
                                 }
                             });
    });

    SyncErrorResult out;
    out.E.assign(K, kNaN);
    out.synchronized.assign(K, false);
    out.diverged = !ok;
    if (ok && samples > 0) {
        for (int k = 0; k < K; ++k) {
            out.E[k] = acc[k] / static_cast<double>(samples);
            out.synchronized[k] = out.E[k] < sp.sync_threshold_scale * p.sizes[k];
        }
    }
    return out;
}

std::vector<SweepRow> sweep(const DenseSymMatrix& At, const SpectralDecomposition& d,
                            const OscillatorModel& model, const SigmaGrid& grid,
                            const DynamicsParams& params) {
    const auto owners = stability_owners(d);
    std::vector<TangentSpec> flat;
    std::vector<std::pair<int, int>> range;
    for (const Owner& o : owners) {
        auto specs = owner_specs(d, o);
        range.emplace_back(static_cast<int>(flat.size()),
                           static_cast<int>(flat.size() + specs.size()));
        flat.insert(flat.end(), specs.begin(), specs.end());
    }
    const Eigen::MatrixXd& Qt = d.Qdyn;
    QuotientChain chain(Qt, model, params.integ, params.chain);
    std::vector<SweepRow> rows;
    for (double sigma : grid.points()) {
        SweepRow row;
        row.sigma = sigma;
        row.E.assign(d.partition.K, kNaN);
        row.mle.assign(owners.size(), kNaN);
        try {
            const Eigen::VectorXd& st = chain.advance_to(sigma);
            const auto res = mle_batch(Qt, model, st, sigma, flat, params.integ, params.mle);
            for (std::size_t o = 0; o < owners.size(); ++o) {
                double mx = -kInf;
                bool bad = false;
                for (int s = range[o].first; s < range[o].second; ++s) {
                    if (std::isnan(res[s].value)) {
                        bad = true;
                        break;
                    }
                    mx = std::max(mx, res[s].value);
                }
                if (!bad) row.mle[o] = mx;
            }
            const SyncErrorResult sim =
                simulate_network(At, d.partition, model, sigma, st, params.integ, params.sim);
            row.network_diverged = sim.diverged;
            if (!sim.diverged) row.E = sim.E;
        } catch (const Divergence&) {
            row.quotient_diverged = true;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace clustersync
