#include "clustersync/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clustersync {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double top_of(const SigmaInterval& i) { return i.bounded ? i.hi : kInf; }

bool hi_equal(const SigmaInterval& a, const SigmaInterval& b, double tol) {
    if (!a.bounded && !b.bounded) return true;
    if (a.bounded != b.bounded) return false;
    return std::abs(a.hi - b.hi) <= tol;
}

// a contained in b (with tolerance at the bounds).
bool contained(const SigmaInterval& a, const SigmaInterval& b, double tol) {
    if (!a.bounded && b.bounded) return false;
    const bool lo_ok = b.lo <= a.lo + tol;
    const bool hi_ok = a.bounded ? (b.bounded ? a.hi <= b.hi + tol : true) : !b.bounded;
    return lo_ok && hi_ok;
}

}  // namespace

std::string to_string(PairType t) {
    switch (t) {
        case PairType::Matryoshka: return "matryoshka";
        case PairType::Identical: return "identical";
        case PairType::PartiallyDisjoint: return "partially-disjoint";
        case PairType::CompleteDisjoint: return "complete-disjoint";
    }
    return "unknown";
}

PairClassification classify_pair(const SigmaInterval& ia, const SigmaInterval& ib, double tol) {
    PairClassification pc;
    pc.a = 0;
    pc.b = 1;
    if (ia.empty || ib.empty) {
        pc.type = PairType::CompleteDisjoint;
        pc.note = "at least one empty interval";
        return pc;
    }
    if (std::abs(ia.lo - ib.lo) <= tol && hi_equal(ia, ib, tol)) {
        pc.type = PairType::Identical;
        pc.note = "matryoshka with equal bounds";
        return pc;
    }
    if (contained(ia, ib, tol)) {
        pc.type = PairType::Matryoshka;
        pc.inner = 0;
        return pc;
    }
    if (contained(ib, ia, tol)) {
        pc.type = PairType::Matryoshka;
        pc.inner = 1;
        return pc;
    }
    const double inter_lo = std::max(ia.lo, ib.lo);
    const double inter_hi = std::min(top_of(ia), top_of(ib));
    pc.type = (inter_lo <= inter_hi + tol) ? PairType::PartiallyDisjoint
                                           : PairType::CompleteDisjoint;
    return pc;
}

std::vector<PairClassification> classify_all(const StabilityProfile& profile, double tol) {
    std::vector<PairClassification> out;
    const int n = static_cast<int>(profile.intervals.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            PairClassification pc = classify_pair(profile.intervals[i], profile.intervals[j], tol);
            pc.inner = pc.inner == 0 ? i : pc.inner == 1 ? j : -1;
            pc.a = i;
            pc.b = j;
            out.push_back(std::move(pc));
        }
    }
    return out;
}

NetworkInterval network_interval(const StabilityProfile& profile) {
    NetworkInterval ni;
    bool any_empty = false;
    for (std::size_t k = 0; k < profile.intervals.size(); ++k) {
        const SigmaInterval& iv = profile.intervals[k];
        if (iv.empty) {
            any_empty = true;
            continue;
        }
        if (ni.k1 < 0 || iv.lo > profile.intervals[ni.k1].lo) {
            ni.k1 = static_cast<int>(k);
        }
        if (ni.k2 < 0 || top_of(iv) < top_of(profile.intervals[ni.k2])) {
            ni.k2 = static_cast<int>(k);
        }
    }
    if (ni.k1 < 0 || ni.k2 < 0) {
        ni.empty = true;
        return ni;
    }
    ni.lo = profile.intervals[ni.k1].lo;
    const double hi = top_of(profile.intervals[ni.k2]);
    ni.bounded = std::isfinite(hi);
    ni.hi = ni.bounded ? hi : 0.0;
    ni.empty = any_empty || (ni.bounded && ni.lo > ni.hi);
    return ni;
}

std::optional<double> rho(const NetworkInterval& ni) {
    if (ni.empty || !ni.bounded || !(ni.lo > 0.0)) return std::nullopt;
    return ni.hi / ni.lo;
}

OwnerMuRange owner_mu_range(const SpectralDecomposition& d, const Owner& owner) {
    OwnerMuRange r;
    if (owner.is_block) {
        const auto& ev = d.blocks.at(owner.index).eigenvalues;
        if (ev.empty()) {
            throw std::invalid_argument("owner_mu_range: block has no eigenvalues");
        }
        r.mu_min = -ev.back();   // mu = -lambda
        r.mu_max = -ev.front();
        r.block_level = true;
    } else {
        if (d.mu.at(owner.index).empty()) {
            throw std::invalid_argument("owner_mu_range: cluster has no transverse spectrum");
        }
        r.mu_min = d.mu_min[owner.index];
        r.mu_max = d.mu_max[owner.index];
    }
    return r;
}

EtaResult eta_b(const SpectralDecomposition& d, const StabilityProfile& profile,
                const NetworkInterval& ni) {
    EtaResult out;
    for (const SigmaInterval& iv : profile.intervals) {
        if (!iv.empty && !iv.bounded) {
            out.note = "unbounded stable intervals present; eta_b is for the bounded case, "
                       "see eta_u";
            return out;
        }
    }
    if (ni.empty) {
        out.defined = true;
        out.value = 0.0;
        out.note = "network interval empty (complete disjoint), eta_b := 0";
        return out;
    }
    const OwnerMuRange r1 = owner_mu_range(d, profile.owners.at(ni.k1));
    const OwnerMuRange r2 = owner_mu_range(d, profile.owners.at(ni.k2));
    out.defined = true;
    out.value = r1.mu_min / r2.mu_max;
    out.block_level = r1.block_level || r2.block_level;
    if (out.block_level) out.note = "block-level spectrum extremes used";
    return out;
}

EtaResult eta_u(const StabilityProfile& profile) {
    EtaResult out;
    double mx = -kInf;
    for (const SigmaInterval& iv : profile.intervals) {
        if (iv.empty) {
            out.note = "empty stable intervals present; eta_u undefined";
            return out;
        }
        if (iv.bounded) {
            out.note = "bounded stable intervals present; see eta_b";
            return out;
        }
        mx = std::max(mx, iv.lo);
    }
    if (!std::isfinite(mx)) {
        out.note = "no owners";
        return out;
    }
    out.defined = true;
    out.value = mx;
    return out;
}

std::vector<OwnerIndices> owner_indices(const SpectralDecomposition& d,
                                        const StabilityProfile& profile) {
    std::vector<OwnerIndices> out;
    out.reserve(profile.owners.size());
    for (const Owner& o : profile.owners) {
        const OwnerMuRange r = owner_mu_range(d, o);
        OwnerIndices oi;
        oi.owner = o;
        oi.eta_b_k = r.mu_min / r.mu_max;
        oi.eta_u_k = r.mu_min;
        oi.block_level = r.block_level;
        out.push_back(std::move(oi));
    }
    return out;
}

CSReport build_report(const SpectralDecomposition& d, const StabilityProfile& profile,
                      std::optional<CompleteSyncIndices> cs, double tol) {
    CSReport rep;
    rep.owners = profile.owners;
    rep.intervals = profile.intervals;
    rep.pairs = classify_all(profile, tol);
    rep.net = network_interval(profile);
    rep.rho_value = rho(rep.net);
    rep.eta_b_value = eta_b(d, profile, rep.net);
    rep.eta_u_value = eta_u(profile);
    rep.per_owner = owner_indices(d, profile);
    rep.complete_sync = cs;
    return rep;
}

PairClassification scan_pair(const StabilityProfile& profile, const NetworkInterval& ni,
                             double tol) {
    const int n = static_cast<int>(profile.intervals.size());
    if (n < 2) {
        throw std::invalid_argument("scan_pair: need at least two owners");
    }
    int a, b;
    if (n == 2) {
        a = 0;
        b = 1;
    } else if (ni.k1 >= 0 && ni.k2 >= 0 && ni.k1 != ni.k2) {
        a = ni.k1;
        b = ni.k2;
    } else if (ni.k1 >= 0) {
        a = ni.k1;
        b = (ni.k1 == 0) ? 1 : 0;  // lowest-index partner
    } else {
        a = 0;
        b = 1;
    }
    PairClassification pc = classify_pair(profile.intervals[a], profile.intervals[b], tol);
    pc.inner = pc.inner == 0 ? a : pc.inner == 1 ? b : -1;
    pc.a = a;
    pc.b = b;
    return pc;
}

}  // namespace clustersync
