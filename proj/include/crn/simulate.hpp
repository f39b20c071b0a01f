#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "rng.hpp"
#include "stability.hpp"

namespace crn {

/// One simulation episode of the slotted queueing system.
struct SimConfig {
    SystemSpec spec;
    ArrivalPoint point;
    double a = 0.5;               ///< probability of serving own data over relay
    std::uint64_t slots = 100000;
    std::uint64_t seed = 1;
    std::uint64_t warmup = 10000; ///< slots excluded from statistics
    /// When set, runs the dummy-packet dominant system instead of the
    /// work-conserving original: the variant's queue is padded with dummies,
    /// dummy transmissions still consume energy, and the PU battery drains
    /// every slot (saturation semantics), so the measured conditional rates
    /// validate the closed forms directly.
    std::optional<Variant> dominant;
};

/// Empirical per-queue statistics from one episode.
struct SimStats {
    double delivered_pu = 0.0; ///< PU packets delivered per slot (direct + relayed)
    double delivered_su = 0.0; ///< per-node SU own-packet delivery rate
    std::map<std::string, double> mean_qlen;
    std::map<std::string, double> growth_slope; ///< packets/slot, least squares
    std::map<std::string, double> empirical_mu; ///< departures per non-empty slot
    std::map<std::string, double> aux;          ///< occupancy/conservation counters
    std::uint64_t slots = 0;
    std::uint64_t warmup = 0;
};

enum class Stability { Stable, Unstable };

inline double default_slope_tol(std::uint64_t slots) {
    return 10.0 / std::sqrt(static_cast<double>(slots));
}

namespace detail {

// RNG stream ids; per-node streams are offset by the node index.
enum SimStream : std::uint64_t {
    kEnergyPu = 0,
    kArrivalPu = 1,
    kLinkPd = 2,
    kPolicy = 3,
    kNodePick = 4,
    kLinkRelay = 5,
    kLinkOwn = 6,
    kEnergySu = 16,  // + node
    kArrivalSu = 48, // + node
    kLinkPs = 80,    // + node
};

// Least-squares slope of y over evenly spaced sample indices, converted to
// packets/slot through the sample spacing.
inline double ls_slope(const std::vector<double>& y, double spacing) {
    const std::size_t n = y.size();
    if (n < 2 || spacing <= 0.0)
        return 0.0;
    const double xbar = 0.5 * (n - 1);
    double ybar = 0.0;
    for (double v : y)
        ybar += v;
    ybar /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - xbar;
        num += dx * (y[i] - ybar);
        den += dx * dx;
    }
    return num / den / spacing;
}

} // namespace detail

/// Runs one slotted episode. Deterministic given the seed: every random
/// draw is keyed by (seed, slot, stream), so runs with different parameters
/// but equal seeds stay slot-aligned.
inline SimStats run_episode(const SimConfig& cfg) {
    validate(cfg.spec);
    validate_point(cfg.point);
    if (cfg.slots <= cfg.warmup)
        throw std::invalid_argument("run_episode: slots must exceed warmup");
    if (!(cfg.a >= 0.0 && cfg.a <= 1.0))
        throw std::invalid_argument("run_episode: a must be in [0,1]");

    using namespace detail;
    const auto& spec = cfg.spec;
    const int K = spec.topology.nodes();
    const bool coop = spec.mode == AccessMode::Cooperative;
    const bool dom1 = cfg.dominant == Variant::DominantI;
    const bool dom2 = cfg.dominant == Variant::DominantII;
    const bool dominant = dom1 || dom2;
    const double lam_ep = spec.energy.lambda_ep;
    const double lam_es = spec.energy.lambda_es;
    const double relay_link = cluster_boost(spec.links.p_sspd, K);

    std::uint64_t qp = 0, qps = 0, qep = 0;
    std::vector<std::uint64_t> qs(K, 0), qes(K, 0);
    std::vector<int> nonempty(K, 0);

    // Conservation counters span the whole episode.
    std::uint64_t harvested_pu = 0, consumed_pu = 0;
    std::vector<std::uint64_t> harvested_su(K, 0), consumed_su(K, 0);
    std::uint64_t relay_admitted = 0, relay_delivered = 0;

    // Post-warmup accumulators.
    const std::uint64_t n_stats = cfg.slots - cfg.warmup;
    std::uint64_t delivered_direct = 0, delivered_relay_stat = 0, delivered_own = 0;
    std::uint64_t pu_tx_slots = 0, admitted_stat = 0;
    std::uint64_t elig_qp = 0, dep_qp = 0, elig_qps = 0, dep_qps = 0;
    std::uint64_t elig_qep = 0, dep_qep = 0;
    std::vector<std::uint64_t> elig_qs(K, 0), dep_qs(K, 0);
    std::vector<std::uint64_t> elig_qes(K, 0), dep_qes(K, 0);
    double sum_qp = 0.0, sum_qps = 0.0, sum_qep = 0.0;
    std::vector<double> sum_qs(K, 0.0), sum_qes_len(K, 0.0);

    // 100 evenly spaced queue-length samples for the growth slope.
    const int n_samples = 100;
    const std::uint64_t stride = std::max<std::uint64_t>(1, n_stats / n_samples);
    std::vector<double> samp_qp, samp_qps, samp_qep;
    std::vector<std::vector<double>> samp_qs(K), samp_qes(K);

    for (std::uint64_t t = 0; t < cfg.slots; ++t) {
        const std::uint64_t seed = cfg.seed;
        const bool in_stats = t >= cfg.warmup;

        // 1. energy arrivals
        if (rng::bernoulli(lam_ep, seed, t, kEnergyPu)) {
            ++qep;
            ++harvested_pu;
        }
        for (int k = 0; k < K; ++k)
            if (rng::bernoulli(lam_es, seed, t, kEnergySu + k)) {
                ++qes[k];
                ++harvested_su[k];
            }

        // 2. data arrivals
        if (rng::bernoulli(cfg.point.lambda_p, seed, t, kArrivalPu))
            ++qp;
        for (int k = 0; k < K; ++k)
            if (rng::bernoulli(cfg.point.lambda_s, seed, t, kArrivalSu + k))
                ++qs[k];

        if (in_stats) {
            elig_qp += qp > 0;
            elig_qep += qep > 0;
        }

        // 3. PU transmission; in dominant mode the battery also drains on
        // empty-queue slots (saturated source), without occupying the channel.
        bool pu_transmitted = false;
        if (qep > 0 && (qp > 0 || dominant)) {
            --qep;
            ++consumed_pu;
            if (in_stats)
                ++dep_qep;
            if (qp > 0) {
                pu_transmitted = true;
                if (rng::bernoulli(spec.links.p_pspd, seed, t, kLinkPd)) {
                    --qp;
                    if (in_stats) {
                        ++delivered_direct;
                        ++dep_qp;
                    }
                } else if (coop) {
                    bool decoded = false;
                    for (int k = 0; k < K; ++k)
                        decoded |= rng::bernoulli(spec.links.p_psss, seed, t, kLinkPs + k);
                    if (decoded) {
                        --qp;
                        ++qps;
                        ++relay_admitted;
                        if (in_stats) {
                            ++dep_qp;
                            ++admitted_stat;
                        }
                    }
                }
            }
        }
        if (in_stats && pu_transmitted)
            ++pu_tx_slots;

        // 4. SU access in sensed-idle slots.
        if (in_stats) {
            elig_qps += qps > 0;
            for (int k = 0; k < K; ++k) {
                elig_qs[k] += qs[k] > 0;
                elig_qes[k] += qes[k] > 0;
            }
        }
        if (!pu_transmitted && coop) {
            int own_count = 0;
            for (int k = 0; k < K; ++k)
                if (qs[k] > 0)
                    nonempty[own_count++] = k;
            const bool rel_avail = qps > 0 || dom2;
            const bool own_avail = own_count > 0 || dom1;

            enum class Src { None, Relay, Own } src = Src::None;
            if (rel_avail && own_avail)
                src = rng::bernoulli(cfg.a, seed, t, kPolicy) ? Src::Own : Src::Relay;
            else if (rel_avail)
                src = Src::Relay;
            else if (own_avail)
                src = Src::Own;

            if (src == Src::Relay) {
                const int payer = rng::uniform_int(K, seed, t, kNodePick);
                if (qes[payer] > 0) {
                    --qes[payer];
                    ++consumed_su[payer];
                    if (in_stats)
                        ++dep_qes[payer];
                    if (rng::bernoulli(relay_link, seed, t, kLinkRelay) && qps > 0) {
                        --qps;
                        ++relay_delivered;
                        if (in_stats) {
                            ++delivered_relay_stat;
                            ++dep_qps;
                        }
                    }
                }
            } else if (src == Src::Own) {
                int payer, link_n;
                if (dom1) {
                    payer = rng::uniform_int(K, seed, t, kNodePick);
                    link_n = K;
                } else {
                    payer = nonempty[rng::uniform_int(own_count, seed, t, kNodePick)];
                    link_n = own_count;
                }
                if (qes[payer] > 0) {
                    --qes[payer];
                    ++consumed_su[payer];
                    if (in_stats)
                        ++dep_qes[payer];
                    const double p_best = cluster_boost(spec.links.p_sssd, link_n);
                    if (rng::bernoulli(p_best, seed, t, kLinkOwn) && qs[payer] > 0) {
                        --qs[payer];
                        if (in_stats) {
                            ++delivered_own;
                            ++dep_qs[payer];
                        }
                    }
                }
            }
        } else if (!pu_transmitted && !coop) {
            // Non-cooperative SU: own data only, single-node semantics per node.
            int own_count = 0;
            for (int k = 0; k < K; ++k)
                if (qs[k] > 0)
                    nonempty[own_count++] = k;
            if (own_count > 0) {
                const int payer = nonempty[rng::uniform_int(own_count, seed, t, kNodePick)];
                if (qes[payer] > 0) {
                    --qes[payer];
                    ++consumed_su[payer];
                    if (in_stats)
                        ++dep_qes[payer];
                    const double p_best = cluster_boost(spec.links.p_sssd, own_count);
                    if (rng::bernoulli(p_best, seed, t, kLinkOwn) && qs[payer] > 0) {
                        --qs[payer];
                        if (in_stats) {
                            ++delivered_own;
                            ++dep_qs[payer];
                        }
                    }
                }
            }
        }

        // 5. statistics
        if (in_stats) {
            sum_qp += qp;
            sum_qps += qps;
            sum_qep += qep;
            for (int k = 0; k < K; ++k) {
                sum_qs[k] += qs[k];
                sum_qes_len[k] += qes[k];
            }
            const std::uint64_t rel = t - cfg.warmup;
            if (rel % stride == 0 && samp_qp.size() < n_samples) {
                samp_qp.push_back(static_cast<double>(qp));
                samp_qps.push_back(static_cast<double>(qps));
                samp_qep.push_back(static_cast<double>(qep));
                for (int k = 0; k < K; ++k) {
                    samp_qs[k].push_back(static_cast<double>(qs[k]));
                    samp_qes[k].push_back(static_cast<double>(qes[k]));
                }
            }
        }
    }

    const bool single = spec.topology.kind == Topology::Kind::SingleSu;
    auto node_name = [&](const char* base, int k) {
        return single ? std::string(base) : std::string(base) + std::to_string(k);
    };
    const double n = static_cast<double>(n_stats);

    SimStats st;
    st.slots = cfg.slots;
    st.warmup = cfg.warmup;
    st.delivered_pu = (delivered_direct + delivered_relay_stat) / n;
    st.delivered_su = delivered_own / n / K;

    st.mean_qlen["Qp"] = sum_qp / n;
    st.mean_qlen["Qps"] = sum_qps / n;
    st.mean_qlen["Qep"] = sum_qep / n;
    st.growth_slope["Qp"] = detail::ls_slope(samp_qp, static_cast<double>(stride));
    st.growth_slope["Qps"] = detail::ls_slope(samp_qps, static_cast<double>(stride));
    st.growth_slope["Qep"] = detail::ls_slope(samp_qep, static_cast<double>(stride));
    auto cond = [](std::uint64_t dep, std::uint64_t elig) {
        return elig > 0 ? static_cast<double>(dep) / elig : 0.0;
    };
    st.empirical_mu["Qp"] = cond(dep_qp, elig_qp);
    st.empirical_mu["Qps"] = cond(dep_qps, elig_qps);
    st.empirical_mu["Qep"] = cond(dep_qep, elig_qep);
    for (int k = 0; k < K; ++k) {
        st.mean_qlen[node_name("Qs", k)] = sum_qs[k] / n;
        st.mean_qlen[node_name("Qes", k)] = sum_qes_len[k] / n;
        st.growth_slope[node_name("Qs", k)] = detail::ls_slope(samp_qs[k], static_cast<double>(stride));
        st.growth_slope[node_name("Qes", k)] = detail::ls_slope(samp_qes[k], static_cast<double>(stride));
        st.empirical_mu[node_name("Qs", k)] = cond(dep_qs[k], elig_qs[k]);
        st.empirical_mu[node_name("Qes", k)] = cond(dep_qes[k], elig_qes[k]);
        st.aux[node_name("p_es_nonempty", k)] = elig_qes[k] / n;
        st.aux[node_name("harvested_su", k)] = static_cast<double>(harvested_su[k]);
        st.aux[node_name("consumed_su", k)] = static_cast<double>(consumed_su[k]);
    }
    st.aux["p_idle"] = 1.0 - pu_tx_slots / n;
    st.aux["lambda_ps"] = admitted_stat / n;
    st.aux["harvested_pu"] = static_cast<double>(harvested_pu);
    st.aux["consumed_pu"] = static_cast<double>(consumed_pu);
    st.aux["relay_admitted"] = static_cast<double>(relay_admitted);
    st.aux["relay_delivered"] = static_cast<double>(relay_delivered);
    st.aux["qps_final"] = static_cast<double>(qps);
    return st;
}

/// Empirical Loynes proxy: a queue is unstable when its sampled length grows
/// faster than slope_tol packets per slot.
inline std::map<std::string, Stability> classify_stability(const SimStats& stats,
                                                           double slope_tol) {
    std::map<std::string, Stability> out;
    for (const auto& [name, slope] : stats.growth_slope)
        out[name] = slope > slope_tol ? Stability::Unstable : Stability::Stable;
    return out;
}

/// True when any data queue (Qp, Qps, Qs*) grows; battery queues are allowed
/// to saturate.
inline bool data_queues_unstable(const SimStats& stats, double slope_tol) {
    for (const auto& [name, slope] : stats.growth_slope)
        if (name[0] == 'Q' && name[1] != 'e' && slope > slope_tol)
            return true;
    return false;
}

/// Monte Carlo counterpart of the analytic envelope at a fixed service
/// probability: per grid point, bisect on lambda_s with a majority vote over
/// seeds deciding stability.
inline RegionBoundary estimate_boundary(const SystemSpec& spec, double a,
                                        const std::vector<double>& lambda_p_grid,
                                        std::uint64_t slots, int seeds,
                                        std::uint64_t base_seed = 1) {
    validate(spec);
    if (seeds < 1)
        throw std::invalid_argument("estimate_boundary: seeds must be >= 1");
    const double tol = 0.01;
    const double slope_tol = default_slope_tol(slots);

    auto unstable = [&](double lp, double ls) {
        int votes = 0;
        for (int s = 0; s < seeds; ++s) {
            SimConfig cfg;
            cfg.spec = spec;
            cfg.point = {lp, ls};
            cfg.a = a;
            cfg.slots = slots;
            cfg.warmup = slots / 10;
            cfg.seed = base_seed + s;
            votes += data_queues_unstable(run_episode(cfg), slope_tol);
        }
        return votes * 2 > seeds;
    };

    RegionBoundary b;
    b.meta.spec = spec;
    b.meta.lambda_p_steps = static_cast<int>(lambda_p_grid.size());
    b.meta.a_steps = 1;
    b.meta.tol = tol;
    b.meta.source = "montecarlo";
    for (double lp : lambda_p_grid) {
        double lo = 0.0, hi = 1.0;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            (unstable(lp, mid) ? hi : lo) = mid;
        }
        b.points.emplace_back(lp, lo);
    }
    return b;
}

} // namespace crn
