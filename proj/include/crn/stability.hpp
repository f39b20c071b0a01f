#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"

namespace crn {

/// Which dummy-packet dominant system decouples the SU queues: in I the SU
/// pads its own data queue with dummies, in II it pads the relay queue.
enum class Variant { DominantI, DominantII };

/// Closed-form per-queue service rates at one operating point.
struct ServiceRates {
    double mu_p = 0.0;           ///< PU data-queue service rate
    double mu_ps = 0.0;          ///< relay-queue service rate
    double mu_s = 0.0;           ///< SU data-queue service rate (per node)
    double p_idle = 0.0;         ///< probability the PU is idle
    double p_es_nonempty = 0.0;  ///< SU battery non-empty probability (clamped)
    double lambda_ps = 0.0;      ///< relay-queue arrival rate
};

struct RegionMeta {
    SystemSpec spec;
    int lambda_p_steps = 0;
    int a_steps = 0;
    double tol = 0.0;
    std::string clamp_policy = "battery occupancy clamped to 1";
    std::string source = "analytic";
};

/// Sampled envelope of the stable-throughput region: for each lambda_p on a
/// uniform grid, the largest sustainable lambda_s.
struct RegionBoundary {
    std::vector<std::pair<double, double>> points; // (lambda_p, lambda_s_max)
    RegionMeta meta;
};

/// PU data-queue service rate. Cooperative topologies add the relay decode
/// path with the best-of-K boost; the non-cooperative PU uses only the
/// direct link.
inline double pu_service_rate(const SystemSpec& spec) {
    const auto& l = spec.links;
    const double lam_ep = spec.energy.lambda_ep;
    if (spec.mode == AccessMode::NonCooperative)
        return l.p_pspd * lam_ep;
    const double decode = cluster_boost(l.p_psss, spec.topology.nodes());
    return (l.p_pspd + (1.0 - l.p_pspd) * decode) * lam_ep;
}

/// Probability the PU is idle, 1 - lambda_ep * (lambda_p / mu_p), clamped to
/// [0,1]. Requires a stable PU queue.
inline double idle_probability(const SystemSpec& spec, double lambda_p) {
    if (lambda_p == 0.0)
        return 1.0;
    const double mu_p = pu_service_rate(spec);
    if (lambda_p >= mu_p)
        throw std::domain_error("idle_probability: PU-unstable point (lambda_p >= mu_p)");
    const double p = 1.0 - spec.energy.lambda_ep * (lambda_p / mu_p);
    return std::clamp(p, 0.0, 1.0);
}

/// SU battery non-empty probability min(1, lambda_es / p_idle); the cluster
/// form carries the K factor from per-node selection. The clamp at 1 is
/// mandatory: the occupancy saturates once the battery fills faster than
/// idle slots can drain it.
inline double battery_nonempty_probability(const SystemSpec& spec, double p_idle) {
    const double lam_es = spec.energy.lambda_es;
    if (lam_es <= 0.0)
        return 0.0;
    if (p_idle <= 0.0)
        return 1.0;
    const double k = static_cast<double>(spec.topology.nodes());
    return std::min(1.0, k * lam_es / p_idle);
}

/// Relay-queue arrival rate: direct link in outage, decoded by (at least
/// one) SU, PU actually transmitting. Zero in non-cooperative mode.
inline double relay_arrival_rate(const SystemSpec& spec, double lambda_p) {
    if (spec.mode == AccessMode::NonCooperative || lambda_p == 0.0)
        return 0.0;
    const double mu_p = pu_service_rate(spec);
    if (lambda_p >= mu_p)
        throw std::domain_error("relay_arrival_rate: PU-unstable point");
    const auto& l = spec.links;
    const double decode = cluster_boost(l.p_psss, spec.topology.nodes());
    return (1.0 - l.p_pspd) * decode * spec.energy.lambda_ep * (lambda_p / mu_p);
}

/// Service rates of the chosen dominant system at one operating point.
/// Throws on a PU-unstable point and on a relay-starved DominantII point
/// (mu_s = 0 with lambda_s > 0).
inline ServiceRates dominant_rates(const SystemSpec& spec, Variant variant,
                                   double a, const ArrivalPoint& point) {
    if (!(a >= 0.0 && a <= 1.0))
        throw std::invalid_argument("dominant_rates: a must be in [0,1]");
    if (spec.mode != AccessMode::Cooperative)
        throw std::invalid_argument("dominant_rates: cooperative spec required");

    ServiceRates r;
    r.mu_p = pu_service_rate(spec);
    if (point.lambda_p >= r.mu_p)
        throw std::domain_error("dominant_rates: PU-unstable point");
    r.p_idle = idle_probability(spec, point.lambda_p);
    r.p_es_nonempty = battery_nonempty_probability(spec, r.p_idle);
    r.lambda_ps = relay_arrival_rate(spec, point.lambda_p);

    const int k = spec.topology.nodes();
    const double delta = 1.0 / k;                      // per-node share
    const double relay_link = cluster_boost(spec.links.p_sspd, k);
    const double own_link = cluster_boost(spec.links.p_sssd, k);
    const double gate = r.p_es_nonempty * r.p_idle;    // energy * idle factor
    const double a_bar = 1.0 - a;

    if (variant == Variant::DominantI) {
        r.mu_ps = relay_link * gate * a_bar;
        // The relay load term makes mu_s independent of the service
        // probability in this system.
        double load = 0.0;
        if (r.lambda_ps > 0.0) {
            const double cap = relay_link * gate;
            load = (cap > 0.0) ? r.lambda_ps / cap : 1.0;
        }
        r.mu_s = std::max(0.0, delta * own_link * gate * (1.0 - load));
    } else {
        r.mu_s = delta * own_link * gate * a;
        if (r.mu_s <= 0.0 && point.lambda_s > 0.0)
            throw std::domain_error("dominant_rates: relay-starved (DominantII mu_s = 0 with lambda_s > 0)");
        // Relay service sees the probability that every own-data queue is
        // empty; at K = 1 the service probability cancels out of the brace.
        double empty_all = 1.0;
        if (point.lambda_s > 0.0) {
            const double frac = std::clamp(1.0 - point.lambda_s / r.mu_s, 0.0, 1.0);
            empty_all = (k == 1) ? frac : std::pow(frac, k);
        }
        r.mu_ps = relay_link * gate * (a_bar + a * empty_all);
    }
    return r;
}

/// Loynes check with strict inequalities on every queue; a queue with zero
/// arrivals is stable regardless of its service rate. Out-of-range points
/// simply return false.
inline bool stable_point(const SystemSpec& spec, Variant variant, double a,
                         const ArrivalPoint& point) {
    ServiceRates r;
    try {
        r = dominant_rates(spec, variant, a, point);
    } catch (const std::domain_error&) {
        return false;
    }
    auto queue_ok = [](double lambda, double mu) {
        return lambda == 0.0 || lambda < mu;
    };
    return queue_ok(point.lambda_p, r.mu_p) && queue_ok(r.lambda_ps, r.mu_ps) &&
           queue_ok(point.lambda_s, r.mu_s);
}

/// Non-cooperative SU service rate (closed form, no policy parameter).
inline double noncoop_su_rate(const SystemSpec& spec, double lambda_p) {
    SystemSpec nc = spec;
    nc.mode = AccessMode::NonCooperative;
    const double mu_p = pu_service_rate(nc);
    if (lambda_p >= mu_p)
        throw std::domain_error("noncoop_su_rate: PU-unstable point");
    const double p_idle = idle_probability(nc, lambda_p);
    const double p_es = battery_nonempty_probability(nc, p_idle);
    const int k = nc.topology.nodes();
    return (1.0 / k) * cluster_boost(nc.links.p_sssd, k) * p_es * p_idle;
}

/// Largest sustainable lambda_s at fixed lambda_p, maximized over both
/// dominant systems and a grid of service probabilities. Bisection is valid
/// because feasibility is monotone-decreasing in lambda_s for every
/// (variant, a).
inline double max_su_rate(const SystemSpec& spec, double lambda_p,
                          const std::vector<double>& a_grid, double tol) {
    if (spec.mode == AccessMode::NonCooperative)
        return noncoop_su_rate(spec, lambda_p);
    if (lambda_p >= pu_service_rate(spec))
        throw std::domain_error("max_su_rate: PU-unstable point");

    auto feasible = [&](double lambda_s) {
        const ArrivalPoint p{lambda_p, lambda_s};
        for (Variant v : {Variant::DominantI, Variant::DominantII})
            for (double a : a_grid)
                if (stable_point(spec, v, a, p))
                    return true;
        return false;
    };

    double lo = 0.0, hi = 1.0;
    if (!feasible(lo))
        return 0.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

inline std::vector<double> uniform_grid(int steps) {
    std::vector<double> g(steps);
    for (int i = 0; i < steps; ++i)
        g[i] = static_cast<double>(i) / (steps - 1);
    return g;
}

/// Envelope of the stable-throughput region on a uniform lambda_p grid over
/// [0, mu_p). The grid stops one step short of mu_p where the PU saturates.
inline RegionBoundary region_envelope(const SystemSpec& spec, int lambda_p_steps,
                                      int a_steps, double tol) {
    if (lambda_p_steps < 2 || a_steps < 2)
        throw std::invalid_argument("region_envelope: step counts must be >= 2");
    validate(spec);
    const double mu_p = pu_service_rate(spec);
    const auto a_grid = uniform_grid(a_steps);

    RegionBoundary b;
    b.meta = RegionMeta{spec, lambda_p_steps, a_steps, tol,
                        "battery occupancy clamped to 1", "analytic"};
    b.points.reserve(lambda_p_steps);
    for (int i = 0; i < lambda_p_steps; ++i) {
        const double lp = mu_p * i / lambda_p_steps;
        b.points.emplace_back(lp, max_su_rate(spec, lp, a_grid, tol));
    }
    return b;
}

/// PU arrival rate at which cooperative and non-cooperative systems yield
/// the same SU throughput. Zero means cooperation dominates everywhere.
inline double crossover_rate(const SystemSpec& spec) {
    if (spec.mode != AccessMode::Cooperative)
        throw std::invalid_argument("crossover_rate: cooperative spec required");
    validate(spec);
    const auto& l = spec.links;
    const int k = spec.topology.nodes();
    const double decode = cluster_boost(l.p_psss, k);       // PU -> best SU
    const double relay_link = cluster_boost(l.p_sspd, k);   // best SU -> PU dest
    const double denom_mu = l.p_pspd + (1.0 - l.p_pspd) * decode;
    const double d = 1.0 / l.p_pspd -
                     (1.0 - l.p_pspd) * decode / (relay_link * denom_mu);
    const double numer = 1.0 - k * spec.energy.lambda_es;
    if (d <= 0.0 || numer <= 0.0)
        return 0.0;
    return numer / d;
}

/// Maximum sustainable PU arrival rate as a function of cluster size;
/// monotone non-decreasing in K with limit lambda_ep.
inline std::vector<double> max_pu_rate_vs_k(const LinkProfile& links,
                                            const EnergyProfile& energy,
                                            const std::vector<int>& k_list) {
    if (k_list.empty())
        throw std::invalid_argument("max_pu_rate_vs_k: k_list must be non-empty");
    std::vector<double> out;
    out.reserve(k_list.size());
    for (int k : k_list) {
        SystemSpec s{Topology::cluster(k), links, energy, AccessMode::Cooperative};
        out.push_back(pu_service_rate(s));
    }
    return out;
}

} // namespace crn
