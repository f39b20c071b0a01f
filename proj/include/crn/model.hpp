#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace crn {

/// Per-link success (non-outage) probabilities. Outage is always derived as
/// 1 - success, never stored.
struct LinkProfile {
    double p_pspd = 0.0; ///< PU source -> PU destination
    double p_psss = 0.0; ///< PU source -> SU (cluster: per-node)
    double p_sspd = 0.0; ///< SU -> PU destination (cluster: per-node)
    double p_sssd = 0.0; ///< SU -> SU destination (cluster: per-node)
};

/// Bernoulli energy-harvest rates, in energy packets per slot.
struct EnergyProfile {
    double lambda_ep = 0.0; ///< PU battery harvest rate
    double lambda_es = 0.0; ///< per-SU battery harvest rate
};

struct Topology {
    enum class Kind { SingleSu, Cluster };
    Kind kind = Kind::SingleSu;
    int k = 1; ///< number of SU relay nodes (1 for SingleSu)

    static Topology single_su() { return {Kind::SingleSu, 1}; }
    static Topology cluster(int k) { return {Kind::Cluster, k}; }
    int nodes() const { return k; }
    bool operator==(const Topology&) const = default;
};

enum class AccessMode { Cooperative, NonCooperative };

/// Full parameterization of a slotted cooperative/non-cooperative system.
/// Immutable after validation; all cluster nodes share one LinkProfile
/// (statistically equivalent nodes).
struct SystemSpec {
    Topology topology;
    LinkProfile links;
    EnergyProfile energy;
    AccessMode mode = AccessMode::Cooperative;
};

/// One (lambda_p, lambda_s) arrival-rate pair, packets per slot.
struct ArrivalPoint {
    double lambda_p = 0.0;
    double lambda_s = 0.0;
};

/// Success probability of the best of k independent identical links:
/// 1 - (1 - p)^k. Monotone in both arguments, identity at k = 1.
inline double cluster_boost(double p_bar, int k) {
    if (k < 1)
        throw std::invalid_argument("cluster_boost: k must be >= 1");
    if (!(p_bar >= 0.0 && p_bar <= 1.0))
        throw std::invalid_argument("cluster_boost: p_bar must be in [0,1]");
    if (k == 1)
        return p_bar;
    return 1.0 - std::pow(1.0 - p_bar, k);
}

namespace detail {
inline bool in01(double x) { return x >= 0.0 && x <= 1.0; }
} // namespace detail

/// All violated invariants, one message per field. Empty means valid.
inline std::vector<std::string> validation_errors(const SystemSpec& spec) {
    std::vector<std::string> errors;
    auto check01 = [&](double v, const char* field) {
        if (!detail::in01(v))
            errors.push_back(std::string(field) + " must be in [0,1], got " +
                             std::to_string(v));
    };
    check01(spec.links.p_pspd, "links.p_pspd");
    check01(spec.links.p_psss, "links.p_psss");
    check01(spec.links.p_sspd, "links.p_sspd");
    check01(spec.links.p_sssd, "links.p_sssd");
    check01(spec.energy.lambda_ep, "energy.lambda_ep");
    check01(spec.energy.lambda_es, "energy.lambda_es");
    if (spec.topology.k < 1)
        errors.push_back("topology: cluster size K must be >= 1, got " +
                         std::to_string(spec.topology.k));
    if (spec.topology.kind == Topology::Kind::SingleSu && spec.topology.k != 1)
        errors.push_back("topology: SingleSu requires K = 1");
    return errors;
}

/// Returns the spec unchanged if every invariant holds, otherwise throws
/// with one line per violated field.
inline const SystemSpec& validate(const SystemSpec& spec) {
    auto errors = validation_errors(spec);
    if (!errors.empty()) {
        std::string msg = "invalid SystemSpec:";
        for (const auto& e : errors)
            msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
    return spec;
}

inline void validate_point(const ArrivalPoint& point) {
    if (!detail::in01(point.lambda_p))
        throw std::invalid_argument("lambda_p must be in [0,1]");
    if (!detail::in01(point.lambda_s))
        throw std::invalid_argument("lambda_s must be in [0,1]");
}

} // namespace crn
