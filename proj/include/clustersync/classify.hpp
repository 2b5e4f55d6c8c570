#pragma once
// Classification of stable sigma-interval relationships between cluster
// pairs, the network-wide stable interval, and the synchronizability
// indices rho, eta_b, eta_u (global and per owner).

#include <optional>
#include <string>
#include <vector>

#include "clustersync/dynamics.hpp"
#include "clustersync/spectral.hpp"

namespace clustersync {

enum class PairType {
    Matryoshka,         // one interval contained in the other
    Identical,          // bounds equal within tolerance (Matryoshka-equal)
    PartiallyDisjoint,  // intervals overlap, neither contains the other
    CompleteDisjoint,   // empty intersection
};

std::string to_string(PairType t);

struct PairClassification {
    int a = 0;  // owner indices into the profile's owner list
    int b = 0;
    PairType type = PairType::Identical;
    int inner = -1;  // Matryoshka: owner whose interval is contained
    std::string note;
};

// Classifies the stable intervals of owners a and b. Bounds are compared
// with tolerance `tol` (the interval-refinement tolerance); unbounded tops
// compare equal to each other and above any bounded top. Empty intervals
// make the pair CompleteDisjoint.
PairClassification classify_pair(const SigmaInterval& ia, const SigmaInterval& ib, double tol);

std::vector<PairClassification> classify_all(const StabilityProfile& profile, double tol);

struct NetworkInterval {
    bool empty = true;
    double lo = 0.0;
    double hi = 0.0;
    bool bounded = true;  // false: every owner is unbounded above
    int k1 = -1;          // owner attaining max of lower bounds (ties: lowest index)
    int k2 = -1;          // owner attaining min of upper bounds (ties: lowest index)
};

// Intersection of all owners' stable intervals: [max_k lo_k, min_k hi_k],
// empty when the bounds cross or any owner interval is empty (k1/k2 still
// report the argmax/argmin over non-empty owners when any exist).
NetworkInterval network_interval(const StabilityProfile& profile);

// rho = hi_{k2} / lo_{k1}; undefined when the network interval is empty or
// unbounded above.
std::optional<double> rho(const NetworkInterval& ni);

struct EtaResult {
    bool defined = false;
    double value = 0.0;
    bool block_level = false;  // used block-spectrum extremes
    std::string note;          // reason when undefined / flag details
};

// Transverse-spectrum extremes of one owner: mu over the owner's modes
// (block owners use the block's eigenvalues, flagged block-level).
struct OwnerMuRange {
    double mu_min = 0.0;
    double mu_max = 0.0;
    bool block_level = false;
};
OwnerMuRange owner_mu_range(const SpectralDecomposition& d, const Owner& owner);

// eta_b = mu_min^{k1} / mu_max^{k2} with k1, k2 the critical owners of the
// network interval; defined as exactly 0 when the network interval is
// empty. Undefined -- with a note directing to eta_u -- when any owner's
// interval is unbounded above.
EtaResult eta_b(const SpectralDecomposition& d, const StabilityProfile& profile,
                const NetworkInterval& ni);

// eta_u = max_k sigma_min^k, defined only when every owner's interval is
// unbounded above (undefined otherwise, with a note).
EtaResult eta_u(const StabilityProfile& profile);

// Per-owner indices: eta_b^k = mu_min^k / mu_max^k and eta_u^k = mu_min^k.
struct OwnerIndices {
    Owner owner;
    double eta_b_k = 0.0;
    double eta_u_k = 0.0;
    bool block_level = false;
};

std::vector<OwnerIndices> owner_indices(const SpectralDecomposition& d,
                                        const StabilityProfile& profile);

// Full cluster-synchronization report consumed by the classify subcommand.
struct CSReport {
    std::vector<Owner> owners;
    std::vector<SigmaInterval> intervals;
    std::vector<PairClassification> pairs;
    NetworkInterval net;
    std::optional<double> rho_value;
    EtaResult eta_b_value;
    EtaResult eta_u_value;
    std::vector<OwnerIndices> per_owner;
    std::optional<CompleteSyncIndices> complete_sync;  // absent if disconnected
};

CSReport build_report(const SpectralDecomposition& d, const StabilityProfile& profile,
                      std::optional<CompleteSyncIndices> cs, double tol);

// Scan-row pair type: the critical pair (k1, k2) when distinct; with k1 ==
// k2 (one owner sets both bounds) the Matryoshka partner with the lowest
// owner index is used.
PairClassification scan_pair(const StabilityProfile& profile, const NetworkInterval& ni,
                             double tol);

}  // namespace clustersync
