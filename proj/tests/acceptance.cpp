// Acceptance gate: one PASS/FAIL/SKIP line per criterion, exit nonzero if
// any criterion fails. Criteria compare computed results against published
// reference values for the 15-node two-population benchmark network and
// run a property suite that needs no external data.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clustersync/classify.hpp"
#include "clustersync/dynamics.hpp"
#include "clustersync/examples.hpp"
#include "clustersync/network.hpp"
#include "clustersync/partition.hpp"
#include "clustersync/spectral.hpp"

namespace cs = clustersync;

namespace {

struct Criterion {
    bool failed = false;
    bool skipped = false;
    std::string detail;
};

std::string fmt(double v, int prec = 4) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

// ------------------------------------------------------------------ cases

struct CaseData {
    std::string name;
    cs::Network net;
    cs::DenseSymMatrix At;
    cs::Partition part;
    cs::SpectralDecomposition dec;
    cs::StabilityProfile prof;  // filled on demand
    bool prof_ready = false;
};

CaseData load_case(const std::string& name) {
    CaseData c;
    c.name = name;
    c.net = cs::generate_example(name).network;
    c.At = cs::shifted_adjacency(c.net);
    c.part = cs::minimum_balanced_coloring(c.At);
    c.dec = cs::decompose(c.At, c.part, 12345);
    return c;
}

const cs::StabilityProfile& profile_of(CaseData& c) {
    if (!c.prof_ready) {
        cs::SigmaGrid grid;
        grid.lo = 0.005;
        grid.hi = 4.5;
        grid.step = 0.02;  // bracketing grid; bisection refines to 1e-3
        cs::DynamicsParams params;
        c.prof = cs::stability_profile(c.dec, cs::van_der_pol(), grid, params);
        c.prof_ready = true;
    }
    return c.prof;
}

// --------------------------------------------------------------- criteria

// Published per-cluster transverse spectra, 2 decimals.
Criterion criterion1(std::vector<CaseData>& cases) {
    Criterion out;
    const auto t0 = std::chrono::steady_clock::now();
    cases.push_back(load_case("fig2-case-a"));
    cases.push_back(load_case("fig2-case-b"));
    cases.push_back(load_case("fig2-case-c"));
    const std::vector<std::vector<double>> want_a = {
        {-17.24, -17.24, -16.00, -13.24, -13.24, -12.76, -12.76, -8.76, -8.76},
        {-12.26, -12.26, -12.20, -12.06, -12.06, -12.04, -12.04, -11.84, -11.84},
        {-12.26, -12.26, -12.20, -12.06, -12.06, -12.04, -12.04, -11.84, -11.84},
    };
    const std::vector<std::vector<double>> want_b = {
        {-15, -15, -15, -15},
        {-15, -15, -15, -15},
        {-22, -22, -22, -22},
    };
    std::ostringstream detail;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        auto check_list = [&](std::vector<double> got, std::vector<double> want,
                              const std::string& label) {
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            if (got.size() != want.size()) {
                out.failed = true;
                detail << " " << cases[i].name << ":" << label << " count " << got.size() << "!="
                       << want.size() << ";";
                return;
            }
            for (std::size_t e = 0; e < got.size(); ++e) {
                if (std::abs(got[e] - want[e]) > 0.01) {
                    out.failed = true;
                    detail << " " << cases[i].name << ":" << label << "[" << e << "] "
                           << fmt(got[e], 6) << " vs " << fmt(want[e], 6) << ";";
                }
            }
        };
        check_list(cases[i].dec.lambda_R[0], want_a[i], "Lambda_R^a");
        check_list(cases[i].dec.lambda_R[1], want_b[i], "Lambda_R^b");
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 1.0) {
        out.failed = true;
        detail << " runtime " << fmt(secs) << "s >= 1s;";
    }
    out.detail = out.failed ? detail.str()
                            : "all six spectra match to +-0.01 in " + fmt(secs, 2) + "s";
    return out;
}

// Published network synchronizability values.
Criterion criterion2(std::vector<CaseData>& cases) {
    Criterion out;
    std::ostringstream detail;
    const std::vector<std::optional<double>> want = {0.50, 0.79, std::nullopt};  // nullopt: 0 exact
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& prof = profile_of(cases[i]);
        const auto ni = cs::network_interval(prof);
        const auto eb = cs::eta_b(cases[i].dec, prof, ni);
        if (i < 2) {
            if (!eb.defined) {
                out.failed = true;
                detail << " " << cases[i].name << ": eta_b undefined (" << eb.note << ");";
            } else if (std::abs(eb.value - *want[i]) > 0.01) {
                out.failed = true;
                detail << " " << cases[i].name << ": eta_b " << fmt(eb.value) << " vs "
                       << fmt(*want[i]) << " +-0.01;";
            } else {
                detail << " " << cases[i].name << ": eta_b " << fmt(eb.value) << " ok;";
            }
        } else {
            if (!eb.defined || eb.value != 0.0) {
                out.failed = true;
                detail << " " << cases[i].name << ": eta_b "
                       << (eb.defined ? fmt(eb.value) : "undefined") << " vs exactly 0;";
            } else {
                detail << " " << cases[i].name << ": eta_b 0 ok;";
            }
        }
    }
    out.detail = detail.str();
    return out;
}

// Published per-cluster sigma-intervals.
Criterion criterion3(std::vector<CaseData>& cases) {
    Criterion out;
    std::ostringstream detail;
    struct Want {
        double lo_a, hi_a, lo_b, hi_b;
    };
    const std::vector<Want> want = {{0.010, 0.610, 0.005, 2.610},
                                    {0.160, 4.010, 0.009, 0.660},
                                    {0.260, 3.810, 0.003, 0.100}};
    int ok = 0, total = 0;
    auto check_bound = [&](const std::string& label, bool have, double got, double target) {
        ++total;
        const double tol = std::max(0.10 * target, 0.005);
        if (have && std::abs(got - target) <= tol) {
            ++ok;
        } else {
            out.failed = true;
            detail << " " << label << " " << (have ? fmt(got) : "none") << " vs " << fmt(target)
                   << ";";
        }
    };
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& prof = profile_of(cases[i]);
        const auto& ia = prof.intervals[0];
        const auto& ib = prof.intervals[1];
        check_bound(cases[i].name + ".C_a.lo", !ia.empty, ia.lo, want[i].lo_a);
        check_bound(cases[i].name + ".C_a.hi", !ia.empty && ia.bounded, ia.hi, want[i].hi_a);
        check_bound(cases[i].name + ".C_b.lo", !ib.empty, ib.lo, want[i].lo_b);
        check_bound(cases[i].name + ".C_b.hi", !ib.empty && ib.bounded, ib.hi, want[i].hi_b);
    }
    std::ostringstream head;
    head << ok << "/" << total << " bounds within max(10%, 0.005):" << detail.str();
    out.detail = head.str();
    return out;
}

// Published classification types and critical-cluster assignments.
Criterion criterion4(std::vector<CaseData>& cases) {
    Criterion out;
    std::ostringstream detail;
    const std::vector<cs::PairType> want_type = {cs::PairType::Matryoshka,
                                                 cs::PairType::PartiallyDisjoint,
                                                 cs::PairType::CompleteDisjoint};
    const std::vector<std::pair<int, int>> want_crit = {{0, 0}, {0, 1}, {-1, -1}};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& prof = profile_of(cases[i]);
        const auto pairs = cs::classify_all(prof, 1e-3);
        const auto ni = cs::network_interval(prof);
        const cs::PairType got = pairs.at(0).type;
        if (got != want_type[i]) {
            out.failed = true;
            detail << " " << cases[i].name << ": " << cs::to_string(got) << " vs "
                   << cs::to_string(want_type[i]) << ";";
        } else {
            detail << " " << cases[i].name << ": " << cs::to_string(got) << " ok;";
        }
        if (want_crit[i].first >= 0 &&
            (ni.k1 != want_crit[i].first || ni.k2 != want_crit[i].second)) {
            out.failed = true;
            detail << " " << cases[i].name << ": critical (k1,k2)=(" << ni.k1 << "," << ni.k2
                   << ") vs (" << want_crit[i].first << "," << want_crit[i].second << ");";
        }
    }
    out.detail = detail.str();
    return out;
}

// Coupling-weight scan over w_a: regime types, boundaries, eta_b formulas.
struct ScanPoint {
    cs::PairType type;
    cs::EtaResult eta;
    cs::NetworkInterval ni;
};

ScanPoint scan_point(double w_a) {
    auto net = cs::two_population_network(w_a, 3.0, 0.1, 12.0);
    auto At = cs::shifted_adjacency(net);
    auto part = cs::minimum_balanced_coloring(At);
    auto dec = cs::decompose(At, part, 12345);
    cs::SigmaGrid grid;
    grid.lo = 0.005;
    grid.hi = 5.0;
    grid.step = 0.05;
    cs::DynamicsParams params;
    auto prof = cs::stability_profile(dec, cs::van_der_pol(), grid, params);
    ScanPoint sp;
    sp.ni = cs::network_interval(prof);
    sp.type = cs::scan_pair(prof, sp.ni, 1e-3).type;
    sp.eta = cs::eta_b(dec, prof, sp.ni);
    return sp;
}

Criterion criterion5() {
    Criterion out;
    std::ostringstream detail;
    const double phi1 = 1.6180339887498949, phi2 = 2.6180339887498949;
    const std::vector<double> ws = {0.5, 1.5, 2.5, 5.0};
    const std::vector<cs::PairType> want_type = {
        cs::PairType::PartiallyDisjoint, cs::PairType::PartiallyDisjoint, cs::PairType::Matryoshka,
        cs::PairType::PartiallyDisjoint};
    // Published eta_b formulas per regime.
    auto f_regime1 = [&](double w) { return (12.0 - phi1 * w) / 15.0; };
    auto f_regime2 = [&](double w) { return (12.0 - phi1 * w) / (12.0 + phi2 * w); };
    auto f_regime3 = [&](double w) { return 15.0 / (12.0 + phi2 * w); };
    const std::vector<std::function<double(double)>> want_eta = {f_regime1, f_regime1, f_regime2,
                                                                 f_regime3};
    std::vector<ScanPoint> pts;
    for (double w : ws) pts.push_back(scan_point(w));
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (pts[i].type != want_type[i]) {
            out.failed = true;
            detail << " w=" << fmt(ws[i]) << ": " << cs::to_string(pts[i].type) << " vs "
                   << cs::to_string(want_type[i]) << ";";
        }
        const double want_val = want_eta[i](ws[i]);
        if (!pts[i].eta.defined || std::abs(pts[i].eta.value - want_val) > 0.01) {
            out.failed = true;
            detail << " w=" << fmt(ws[i]) << ": eta_b "
                   << (pts[i].eta.defined ? fmt(pts[i].eta.value) : "undefined") << " vs formula "
                   << fmt(want_val) << ";";
        }
    }

    // Regime boundaries: bisect on the type transition when the anchor
    // types bracket one.
    auto find_boundary = [&](double w_lo, cs::PairType t_lo, double w_hi, cs::PairType t_hi,
                             double target, const char* label) {
        if (t_lo == t_hi) {
            out.failed = true;
            detail << " " << label << ": no type change in [" << fmt(w_lo) << "," << fmt(w_hi)
                   << "];";
            return;
        }
        double lo = w_lo, hi = w_hi;
        for (int it = 0; it < 4; ++it) {
            double mid = 0.5 * (lo + hi);
            if (scan_point(mid).type == t_lo) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double found = 0.5 * (lo + hi);
        if (std::abs(found - target) > 0.15) {
            out.failed = true;
            detail << " " << label << ": boundary " << fmt(found) << " vs " << fmt(target)
                   << " +-0.15;";
        } else {
            detail << " " << label << ": boundary " << fmt(found) << " ok;";
        }
    };
    find_boundary(1.5, pts[1].type, 2.5, pts[2].type, 1.885, "PD->M");
    find_boundary(2.5, pts[2].type, 5.0, pts[3].type, 3.225, "M->PD");
    out.detail = detail.str().empty() ? "types, formulas, and boundaries match" : detail.str();
    return out;
}

Criterion criterion6() {
    Criterion out;
    out.skipped = true;
    out.detail =
        "spot checks against published values for external datasets (neural, brain, "
        "Twitter networks) need the user-supplied data; none are bundled and this "
        "environment has no network access";
    return out;
}

// ------------------------------------------------- criterion 7: properties

void enumerate_partitions(int n, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> a(n, 0);
    while (true) {
        fn(a);
        int i = n - 1;
        for (; i > 0; --i) {
            int cap = *std::max_element(a.begin(), a.begin() + i) + 1;
            if (a[i] < cap) {
                ++a[i];
                std::fill(a.begin() + i + 1, a.end(), 0);
                break;
            }
        }
        if (i == 0) break;
    }
}

cs::Partition labels_to_partition(const std::vector<int>& labels) {
    cs::Partition p;
    p.cluster_of = labels;
    p.K = *std::max_element(labels.begin(), labels.end()) + 1;
    p.sizes.assign(p.K, 0);
    for (int c : labels) ++p.sizes[c];
    p.K_nontrivial = 0;
    for (int s : p.sizes) {
        if (s > 1) ++p.K_nontrivial;
    }
    return p;
}

bool prop_coloring_oracle(std::string& why) {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> wdist(1, 2);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 5);  // 4..8
        cs::DenseSymMatrix A(n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (coin(rng) < 0.45) A.set(i, j, static_cast<double>(wdist(rng)));
            }
        }
        auto ours = cs::minimum_balanced_coloring(A);
        if (!cs::is_equitable(A, ours)) {
            why = "trial " + std::to_string(trial) + ": coloring is not equitable";
            return false;
        }
        int best_k = n + 1;
        enumerate_partitions(n, [&](const std::vector<int>& labels) {
            auto p = labels_to_partition(labels);
            if (p.K < best_k && cs::is_equitable(A, p)) best_k = p.K;
        });
        if (ours.K != best_k) {
            why = "trial " + std::to_string(trial) + ": K=" + std::to_string(ours.K) +
                  " but brute force found " + std::to_string(best_k);
            return false;
        }
    }
    return true;
}

cs::DenseSymMatrix random_equitable_graph(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nblocks(2, 3);
    std::uniform_int_distribution<int> bsize(3, 5);
    std::uniform_real_distribution<double> wdist(0.5, 3.0);
    const int B = nblocks(rng);
    std::vector<int> sizes(B);
    int n = 0;
    for (int b = 0; b < B; ++b) {
        sizes[b] = bsize(rng);
        n += sizes[b];
    }
    cs::DenseSymMatrix A(n);
    int off_p = 0;
    for (int p = 0; p < B; ++p) {
        const int sp = sizes[p];
        const double wi = wdist(rng);
        const int shift = 1 + static_cast<int>(rng() % std::max(1, sp / 2));
        for (int r = 0; r < sp; ++r) {
            const int s = (r + shift) % sp;
            if (s != r) A.set(off_p + r, off_p + s, wi);
        }
        int off_q = off_p + sp;
        for (int q = p + 1; q < B; ++q) {
            const double wb = wdist(rng);
            for (int r = 0; r < sp; ++r) {
                for (int s = 0; s < sizes[q]; ++s) A.set(off_p + r, off_q + s, wb);
            }
            off_q += sizes[q];
        }
        off_p += sp;
    }
    return A;
}

bool prop_spectrum_and_reconstruction(std::string& why) {
    std::mt19937_64 rng(2002);
    int done = 0;
    while (done < 50) {
        auto A = random_equitable_graph(rng);
        auto p = cs::minimum_balanced_coloring(A);
        const int n = A.order();
        if (p.K < 2 || p.K >= n) continue;
        ++done;
        auto d = cs::decompose(A, p, 12345 + done);
        const double tol = 1e-8 * std::max(1.0, A.max_abs());

        Eigen::MatrixXd M = d.T * A.mat() * d.T.transpose();
        Eigen::MatrixXd built = Eigen::MatrixXd::Zero(n, n);
        built.topLeftCorner(p.K, p.K) = d.Q;
        int at = p.K;
        for (const auto& blk : d.blocks) {
            const int bd = static_cast<int>(blk.R.rows());
            built.block(at, at, bd, bd) = blk.R;
            at += bd;
        }
        if ((M - built).cwiseAbs().maxCoeff() > tol) {
            why = "reconstruction residual " + fmt((M - built).cwiseAbs().maxCoeff()) +
                  " on graph " + std::to_string(done);
            return false;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.mat());
        std::vector<double> all(es.eigenvalues().data(), es.eigenvalues().data() + n);
        std::sort(all.begin(), all.end());
        std::vector<double> parts(d.lambda_Q.begin(), d.lambda_Q.end());
        for (const auto& blk : d.blocks) {
            parts.insert(parts.end(), blk.eigenvalues.begin(), blk.eigenvalues.end());
        }
        std::sort(parts.begin(), parts.end());
        if (parts.size() != all.size()) {
            why = "eigenvalue count mismatch on graph " + std::to_string(done);
            return false;
        }
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (std::abs(all[i] - parts[i]) > tol) {
                why = "spectrum conservation violated by " + fmt(std::abs(all[i] - parts[i])) +
                      " on graph " + std::to_string(done);
                return false;
            }
        }
    }
    return true;
}

bool prop_vdp(std::string& why) {
    auto m = cs::van_der_pol();
    // Finite-difference Jacobians.
    std::mt19937_64 rng(3003);
    std::uniform_real_distribution<double> xdist(-3.0, 3.0);
    const double h = 1e-6;
    for (int trial = 0; trial < 25; ++trial) {
        double x[2] = {xdist(rng), xdist(rng)};
        double jf[4], jh[4];
        m.DF(x, jf);
        m.DH(x, jh);
        for (int col = 0; col < 2; ++col) {
            double xp[2] = {x[0], x[1]}, xm[2] = {x[0], x[1]};
            xp[col] += h;
            xm[col] -= h;
            double fp[2], fm[2], hp[2], hm[2];
            m.F(xp, fp);
            m.F(xm, fm);
            m.H(xp, hp);
            m.H(xm, hm);
            for (int row = 0; row < 2; ++row) {
                const double scale = std::max(1.0, std::abs(jf[row * 2 + col]));
                if (std::abs(jf[row * 2 + col] - (fp[row] - fm[row]) / (2 * h)) > 1e-4 * scale ||
                    std::abs(jh[row * 2 + col] - (hp[row] - hm[row]) / (2 * h)) > 1e-4) {
                    why = "Jacobian finite-difference mismatch";
                    return false;
                }
            }
        }
    }

    // MLE at zero coupling along the limit cycle.
    auto net = cs::two_population_network(2.0, 3.0, 0.1, 12.0);
    auto At = cs::shifted_adjacency(net);
    auto part = cs::minimum_balanced_coloring(At);
    auto dec = cs::decompose(At, part, 12345);
    cs::IntegratorParams ip;
    cs::MleParams mp;
    cs::ChainParams cp;
    cs::QuotientChain chain(dec.Qdyn, m, ip, cp);
    auto state0 = chain.advance_to(0.0);
    auto r = cs::transverse_mle(dec.Qdyn, m, state0, 0.0, 0, 0.0, ip, mp);
    if (std::abs(r.value) > 0.01) {
        why = "MLE(0) = " + fmt(r.value) + " not within 0.01 of 0";
        return false;
    }
    return true;
}

// Random connected network with a nontrivial equitable partition, N <= 6.
cs::DenseSymMatrix random_small_clustered(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> wdist(0.5, 2.0);
    // Two blocks of sizes 2..3 with circulant-internal + complete bipartite
    // coupling, as in the larger generator but capped at N <= 6.
    std::uniform_int_distribution<int> bsize(2, 3);
    const int s0 = bsize(rng), s1 = bsize(rng);
    const int n = s0 + s1;
    cs::DenseSymMatrix A(n);
    const double w0 = wdist(rng), w1 = wdist(rng), wx = wdist(rng);
    for (int r = 0; r < s0; ++r) {
        const int s = (r + 1) % s0;
        if (s != r) A.set(r, s, w0);
    }
    for (int r = 0; r < s1; ++r) {
        const int s = (r + 1) % s1;
        if (s != r) A.set(s0 + r, s0 + s, w1);
    }
    for (int r = 0; r < s0; ++r) {
        for (int s = 0; s < s1; ++s) A.set(r, s0 + s, wx);
    }
    return A;
}

// Direct variational growth of transverse perturbations on the full
// network around the synchronous trajectory.
double direct_transverse_exponent(const cs::DenseSymMatrix& At, const cs::Partition& part,
                                  const cs::OscillatorModel& m, double sigma,
                                  const Eigen::VectorXd& state0, double t_transient,
                                  double t_measure) {
    const int n = At.order();
    const int dim = m.dim;
    const double dt = 1e-3;
    auto project = [&](Eigen::VectorXd& v) {
        for (int k = 0; k < part.K; ++k) {
            for (int c = 0; c < dim; ++c) {
                double mean = 0.0;
                int cnt = 0;
                for (int i = 0; i < n; ++i) {
                    if (part.cluster_of[i] == k) {
                        mean += v[i * dim + c];
                        ++cnt;
                    }
                }
                mean /= cnt;
                for (int i = 0; i < n; ++i) {
                    if (part.cluster_of[i] == k) v[i * dim + c] -= mean;
                }
            }
        }
    };
    Eigen::VectorXd x(n * dim);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < dim; ++c) x[i * dim + c] = state0[part.cluster_of[i] * dim + c];
    }
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd delta(n * dim);
    for (int i = 0; i < n * dim; ++i) delta[i] = gauss(rng);
    project(delta);
    delta.normalize();

    std::vector<double> jf(dim * dim), jh(n * dim * dim), hbuf(n * dim), f(dim);
    auto rhs = [&](const Eigen::VectorXd& xs, const Eigen::VectorXd& ds, Eigen::VectorXd& xdot,
                   Eigen::VectorXd& ddot) {
        for (int i = 0; i < n; ++i) {
            m.H(xs.data() + i * dim, hbuf.data() + i * dim);
            m.DH(xs.data() + i * dim, jh.data() + i * dim * dim);
        }
        for (int i = 0; i < n; ++i) {
            m.F(xs.data() + i * dim, f.data());
            m.DF(xs.data() + i * dim, jf.data());
            for (int r = 0; r < dim; ++r) {
                double acc = 0.0, dd = 0.0;
                for (int c = 0; c < dim; ++c) dd += jf[r * dim + c] * ds[i * dim + c];
                for (int j = 0; j < n; ++j) {
                    const double w = At(i, j);
                    if (w != 0.0) acc += w * hbuf[j * dim + r];
                }
                xdot[i * dim + r] = f[r] + sigma * acc;
                ddot[i * dim + r] = dd;
            }
            for (int j = 0; j < n; ++j) {
                const double w = At(i, j);
                if (w == 0.0) continue;
                const double* jhj = jh.data() + j * dim * dim;
                for (int r = 0; r < dim; ++r) {
                    double dd = 0.0;
                    for (int c = 0; c < dim; ++c) dd += jhj[r * dim + c] * ds[j * dim + c];
                    ddot[i * dim + r] += sigma * w * dd;
                }
            }
        }
    };
    double logsum = 0.0, measured = 0.0, t = 0.0, next_renorm = 1.0;
    Eigen::VectorXd k1x(n * dim), k1d(n * dim), k2x(n * dim), k2d(n * dim), k3x(n * dim),
        k3d(n * dim), k4x(n * dim), k4d(n * dim), tx(n * dim), td(n * dim);
    while (t < t_transient + t_measure - 0.5 * dt) {
        rhs(x, delta, k1x, k1d);
        tx = x + 0.5 * dt * k1x;
        td = delta + 0.5 * dt * k1d;
        rhs(tx, td, k2x, k2d);
        tx = x + 0.5 * dt * k2x;
        td = delta + 0.5 * dt * k2d;
        rhs(tx, td, k3x, k3d);
        tx = x + dt * k3x;
        td = delta + dt * k3d;
        rhs(tx, td, k4x, k4d);
        x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
        delta += dt / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
        t += dt;
        if (t >= next_renorm - 0.5 * dt) {
            project(delta);
            const double g = delta.norm();
            if (t > t_transient) {
                logsum += std::log(g);
                measured += 1.0;
            }
            delta /= g;
            next_renorm += 1.0;
        }
    }
    return logsum / measured;
}

bool prop_sign_agreement(std::string& why) {
    auto m = cs::van_der_pol();
    std::mt19937_64 rng(4004);
    cs::IntegratorParams ip;
    cs::MleParams mp;
    for (int net_idx = 0; net_idx < 10; ++net_idx) {
        auto A = random_small_clustered(rng);
        auto part = cs::minimum_balanced_coloring(A);
        if (part.K < 2 || part.K >= A.order()) {
            --net_idx;  // resample; the family virtually always yields K >= 2
            continue;
        }
        auto dec = cs::decompose(A, part, 777 + net_idx);
        const auto owners = cs::stability_owners(dec);
        std::vector<cs::TangentSpec> specs;
        for (const auto& o : owners) {
            if (o.is_block) {
                specs.push_back(cs::block_tangent(dec, o.index));
            } else {
                for (double mu : dec.mu[o.index]) {
                    specs.push_back(cs::scalar_tangent(o.index, mu));
                }
            }
        }
        // Reference at one sigma: max MLE over all owners.
        auto ref_mle = [&](double sigma) -> std::optional<double> {
            cs::ChainParams cp;
            cp.seed = 555 + net_idx;
            cs::QuotientChain chain(dec.Qdyn, m, ip, cp);
            Eigen::VectorXd state0;
            try {
                state0 = chain.advance_to(sigma);
            } catch (const cs::Divergence&) {
                return std::nullopt;  // no coherent state at this sigma
            }
            auto rs = cs::mle_batch(dec.Qdyn, m, state0, sigma, specs, ip, mp);
            double ref = -1e300;
            for (const auto& r : rs) ref = std::max(ref, r.value);
            return ref;
        };
        const std::vector<double> ladder = {0.02, 0.06, 0.18, 0.5, 1.4};
        for (double sigma0 : ladder) {
            // Sign tests are ill-posed where the exponent is near its
            // zero crossing; walk sigma up until the reference MLE is
            // clearly nonzero.
            double sigma = sigma0;
            std::optional<double> ref;
            for (int attempt = 0; attempt < 6; ++attempt) {
                ref = ref_mle(sigma);
                if (ref && std::abs(*ref) >= 0.02) break;
                sigma *= 1.6;
                ref.reset();
            }
            if (!ref) continue;
            cs::ChainParams cp;
            cp.seed = 555 + net_idx;
            cs::QuotientChain chain(dec.Qdyn, m, ip, cp);
            const Eigen::VectorXd state0 = chain.advance_to(sigma);
            const double direct =
                direct_transverse_exponent(A, part, m, sigma, state0, 50.0, 250.0);
            if (direct * *ref <= 0.0) {
                why = "network " + std::to_string(net_idx) + " sigma=" + fmt(sigma) + ": direct " +
                      fmt(direct) + " vs MLE " + fmt(*ref);
                return false;
            }
        }
    }
    return true;
}

bool prop_alpha(std::string& why) {
    for (int N = 4; N <= 8; ++N) {
        std::vector<cs::Edge> edges;
        for (int i = 0; i < N; ++i) {
            for (int j = i + 1; j < N; ++j) edges.push_back({i, j, 1.0});
        }
        auto kn = cs::make_network(N, edges, 0.0);
        auto idx = cs::complete_sync_indices(cs::laplacian(kn));
        if (std::abs(idx.alpha_b - 1.0) > 1e-12) {
            why = "alpha_b(K" + std::to_string(N) + ") = " + fmt(idx.alpha_b, 17);
            return false;
        }
    }
    auto p3 = cs::make_network(3, {{0, 1, 1.0}, {1, 2, 1.0}}, 0.0);
    auto ip3 = cs::complete_sync_indices(cs::laplacian(p3));
    if (std::abs(ip3.alpha_b - 1.0 / 3.0) > 1e-10) {
        why = "alpha_b(P3) = " + fmt(ip3.alpha_b, 17);
        return false;
    }
    return true;
}

Criterion criterion7() {
    Criterion out;
    std::ostringstream detail;
    struct Prop {
        const char* name;
        bool (*fn)(std::string&);
    };
    const std::vector<Prop> props = {
        {"coloring-oracle", prop_coloring_oracle},
        {"spectrum+reconstruction", prop_spectrum_and_reconstruction},
        {"vdp-jacobians+mle0", prop_vdp},
        {"sign-agreement", prop_sign_agreement},
        {"alpha-ratios", prop_alpha},
    };
    for (const auto& prop : props) {
        std::string why;
        if (prop.fn(why)) {
            detail << " " << prop.name << " ok;";
        } else {
            out.failed = true;
            detail << " " << prop.name << ": " << why << ";";
        }
    }
    out.detail = detail.str();
    return out;
}

}  // namespace

int main() {
    std::vector<CaseData> cases;  // filled (and timed) by criterion 1

    struct Entry {
        int number;
        const char* title;
        std::function<Criterion()> fn;
    };
    const std::vector<Entry> entries = {
        {1, "transverse spectra", [&] { return criterion1(cases); }},
        {2, "synchronizability values", [&] { return criterion2(cases); }},
        {3, "sigma-intervals", [&] { return criterion3(cases); }},
        {4, "classification", [&] { return criterion4(cases); }},
        {5, "coupling-weight scan regimes", [] { return criterion5(); }},
        {6, "external dataset spot checks", [] { return criterion6(); }},
        {7, "property suite", [] { return criterion7(); }},
    };
    bool any_failed = false;
    for (const auto& e : entries) {
        Criterion c = e.fn();
        const char* verdict = c.skipped ? "SKIP" : (c.failed ? "FAIL" : "PASS");
        any_failed = any_failed || c.failed;
        std::printf("%s criterion %d (%s):%s%s\n", verdict, e.number, e.title,
                    c.detail.empty() || c.detail[0] == ' ' ? "" : " ", c.detail.c_str());
        std::fflush(stdout);
    }
    return any_failed ? 1 : 0;
}
