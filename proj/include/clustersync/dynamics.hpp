#pragma once
// Oscillator dynamics: fixed-step RK4 integration of quotient and full
// network ODEs, Benettin maximum-Lyapunov-exponent estimates for the
// transverse variational equations (per-(cluster, mu) and per-block),
// stable sigma-interval bracketing, synchronization errors, and sweeps.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clustersync/network.hpp"
#include "clustersync/partition.hpp"
#include "clustersync/spectral.hpp"

namespace clustersync {

// Uncoupled node dynamics x' = F(x) with coupling field H. Callbacks take
// a state of length `dim`; Jacobians fill a row-major dim*dim buffer.
struct OscillatorModel {
    int dim = 0;
    std::string name;
    std::function<void(const double*, double*)> F;
    std::function<void(const double*, double*)> H;
    std::function<void(const double*, double*)> DF;
    std::function<void(const double*, double*)> DH;
};

// Built-in Van der Pol oscillator:
//   F(x) = (x2, -x1 + 3(1 - x1^2) x2),  H(x) = (0, x2).
// Integration kernels recognize it by name and use an inlined fast path;
// the callbacks remain valid for generic use and finite-difference checks.
OscillatorModel van_der_pol();

struct IntegratorParams {
    double dt = 1e-3;
    double divergence_guard = 1e6;  // |any state component| above this aborts
};

struct MleParams {
    double renorm = 1.0;       // tangent renormalization interval tau_r
    double transient = 100.0;  // discarded before averaging
    double horizon = 400.0;    // total integration time per MLE
    double eps_conv = 5e-3;    // spread of the trailing running estimates
    int tail = 10;             // number of trailing estimates tested
};

struct ChainParams {
    double settle = 100.0;            // per-sigma quotient settling time
    double uncoupled_warmup = 100.0;  // first-sigma attractor warmup
    std::uint64_t seed = 12345;       // random attractor-phase pick
};

struct SimParams {
    double horizon = 500.0;
    double window_lo = 450.0;
    double window_hi = 500.0;
    double delta = 1e-4;               // perturbation per component, random sign
    double sync_threshold_scale = 1e-3;  // synchronized iff E_k < scale * n_k
    std::uint64_t seed = 12345;
};

struct SigmaGrid {
    double lo = 0.005;
    double hi = 3.0;
    double step = 0.005;

    std::vector<double> points() const;
};

struct IntervalParams {
    double refine_tol = 1e-3;       // bisection width in sigma
    double unbounded_margin = 0.05; // stable-at-top margin marking unbounded
};

struct DynamicsParams {
    IntegratorParams integ;
    MleParams mle;
    ChainParams chain;
    SimParams sim;
    IntervalParams interval;
};

struct Divergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense-output trajectory of n coupled units (n*model.dim states per row).
struct Trajectory {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    bool diverged = false;
};

// Integrates x_i' = F(x_i) + sigma * sum_j C_ij H(x_j) for i over the rows
// of `coupling` (a 0x0 coupling means one uncoupled unit) from t0 to t1.
// On divergence the trajectory is truncated and flagged.
Trajectory integrate(const OscillatorModel& model, const Eigen::MatrixXd& coupling,
                     double sigma, const Eigen::VectorXd& ic, double t0, double t1,
                     const IntegratorParams& ip);

// Settled quotient attractor sample recorded at one sigma.
struct QuotientTrajectory {
    double sigma = 0.0;
    Trajectory traj;
};

// Continuation manager for the quotient equation
//   s_k' = F(s_k) + sigma * sum_j Qt_kj H(s_j):
// the first sigma starts from a seeded random point on the uncoupled
// attractor (replicated across clusters); each later sigma starts from the
// previous sigma's settled state. advance_to() settles `settle` time units
// and returns the settled state (K*m), throwing Divergence when the
// quotient flow blows up ("no coherent cluster state at this sigma").
class QuotientChain {
public:
    QuotientChain(Eigen::MatrixXd Qt, const OscillatorModel& model,
                  const IntegratorParams& ip, const ChainParams& cp);

    const Eigen::VectorXd& advance_to(double sigma);
    // advance_to(sigma) followed by `record` recorded time units (the
    // chain continues from the recorded segment's end point).
    QuotientTrajectory trajectory(double sigma, double record);
    const Eigen::VectorXd& state() const { return state_; }
    bool started() const { return started_; }
    // Overrides the continuation state (used by bisection refinement).
    void set_state(const Eigen::VectorXd& s) { state_ = s; started_ = true; }
    const Eigen::MatrixXd& quotient() const { return Qt_; }

private:
    Eigen::MatrixXd Qt_;
    OscillatorModel model_;
    IntegratorParams ip_;
    ChainParams cp_;
    Eigen::VectorXd state_;
    bool started_ = false;
    std::uint64_t draws_ = 0;  // restarts consume fresh attractor phases
};

struct MLEResult {
    double value = 0.0;
    bool converged = false;
    std::vector<double> window_estimates;  // trailing running estimates
};

// One transverse variational system
//   y' = [sum_k P_k (x) DF(s_k) + sigma * sum_k G_k (x) DH(s_k)] y
// with y of size d*m, P_k the block-restricted cluster projectors and
// G_k = R_l P_k. The scalar case (d=1, P=[1], G=[lambda]) is exactly the
// per-mode form y' = [DF(s_k) - sigma*mu DH(s_k)] y with lambda = -mu.
struct TangentSpec {
    int d = 1;
    struct Term {
        int cluster = 0;
        Eigen::MatrixXd P;  // d x d
        Eigen::MatrixXd G;  // d x d
    };
    std::vector<Term> terms;
};

TangentSpec scalar_tangent(int cluster, double mu);
TangentSpec block_tangent(const SpectralDecomposition& d, int block);

// Shared kernel: integrates the quotient from `state0` (settled at sigma)
// together with all tangent systems, Benettin-renormalizing every
// mp.renorm; returns one MLEResult per spec.
std::vector<MLEResult> mle_batch(const Eigen::MatrixXd& Qt, const OscillatorModel& model,
                                 const Eigen::VectorXd& state0, double sigma,
                                 const std::vector<TangentSpec>& specs,
                                 const IntegratorParams& ip, const MleParams& mp);

// Maximum Lyapunov exponent of the transverse variational equation for one
// (cluster, mu) pair along the quotient trajectory started at state0.
MLEResult transverse_mle(const Eigen::MatrixXd& Qt, const OscillatorModel& model,
                         const Eigen::VectorXd& state0, double sigma, int cluster,
                         double mu, const IntegratorParams& ip, const MleParams& mp);

// MLE of the coupled variational equation of transverse block l. Reduces
// exactly to transverse_mle (same arithmetic path) when the block is 1x1.
MLEResult block_mle(const SpectralDecomposition& d, const OscillatorModel& model,
                    const Eigen::VectorXd& state0, double sigma, int block,
                    const IntegratorParams& ip, const MleParams& mp);

// A stability owner: one cluster (max over its scalar transverse modes) or
// one shared block of the decomposition.
struct Owner {
    bool is_block = false;
    int index = 0;              // cluster index or block index
    std::string label;          // "cluster:k" or "block:l"
    std::vector<int> clusters;  // clusters covered
};

// Owners in report order: per-cluster owners for clusters whose transverse
// modes live in single-cluster blocks, then one owner per shared block.
std::vector<Owner> stability_owners(const SpectralDecomposition& d);

struct SigmaInterval {
    double lo = 0.0;
    double hi = 0.0;       // ignored when !bounded
    bool bounded = true;   // false: stable with margin at the grid top (hi = +inf marker)
    bool empty = false;    // no stable sigma found on the grid
    Owner owner;
    std::vector<std::pair<double, double>> windows;  // all stable windows
    std::string note;
};

struct StabilityCurvePoint {
    double sigma = 0.0;
    std::vector<double> mle;      // per owner: max MLE over the owner's modes
    std::vector<bool> converged;  // per owner
    bool quotient_diverged = false;
};

struct StabilityProfile {
    std::vector<Owner> owners;
    std::vector<StabilityCurvePoint> curve;
    std::vector<SigmaInterval> intervals;  // per owner
};

// Scans the grid with the continuation protocol, computing every owner's
// max-MLE at each sigma, then brackets each sign change by bisection to
// ip.refine_tol. Stable-at-top owners with MLE < -unbounded_margin are
// marked unbounded; otherwise noted "bounded within scan range". The
// widest stable window becomes [lo, hi]; all windows are attached.
StabilityProfile stability_profile(const SpectralDecomposition& d,
                                   const OscillatorModel& model, const SigmaGrid& grid,
                                   const DynamicsParams& params);

// Stable interval of one owner (index into stability_owners(d)).
SigmaInterval sigma_interval(const SpectralDecomposition& d, const OscillatorModel& model,
                             int owner_index, const SigmaGrid& grid,
                             const DynamicsParams& params);

struct SyncErrorResult {
    std::vector<double> E;           // per cluster, all K clusters
    std::vector<bool> synchronized;  // E_k < scale * n_k
    bool diverged = false;
};

// Integrates the full network x_i' = F(x_i) + sigma sum_j At_ij H(x_j)
// from the cluster-synchronous point given by chain_state (K*m) with
// per-component random-sign delta perturbations; E_k is the time average
// over [window_lo, window_hi] of sum_{i in C_k} ||x_i - x_ref|| with
// x_ref the cluster's lowest-index node.
SyncErrorResult simulate_network(const DenseSymMatrix& At, const Partition& p,
                                 const OscillatorModel& model, double sigma,
                                 const Eigen::VectorXd& chain_state,
                                 const IntegratorParams& ip, const SimParams& sp);

struct SweepRow {
    double sigma = 0.0;
    std::vector<double> E;    // per cluster
    std::vector<double> mle;  // per owner
    bool quotient_diverged = false;
    bool network_diverged = false;
};

// Full sweep: per grid sigma, continuation quotient + network sync errors
// + per-owner max MLEs. Per-sigma failures are recorded inline and the
// sweep continues.
std::vector<SweepRow> sweep(const DenseSymMatrix& At, const SpectralDecomposition& d,
                            const OscillatorModel& model, const SigmaGrid& grid,
                            const DynamicsParams& params);

}  // namespace clustersync
