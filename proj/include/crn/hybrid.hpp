#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsmc.hpp"
#include "rng.hpp"
#include "simulate.hpp"

namespace crn {

/// Probability distribution over FSMC channel states maintained by the SU.
using BeliefVector = std::vector<double>;

enum class Action { Cooperate, Underlay };

/// Per-state rewards: cooperation pays off below the outage threshold,
/// underlay access above it, never both.
struct RewardTable {
    std::vector<double> a_coop;
    std::vector<double> b_under;

    static RewardTable defaults() {
        return {{5, 5, 5, 5, 0, 0, 0, 0}, {0, 0, 0, 0, 6, 7, 8, 9}};
    }
};

inline void validate(const RewardTable& t) {
    if (t.a_coop.size() != t.b_under.size())
        throw std::invalid_argument("RewardTable: column length mismatch");
    for (std::size_t m = 0; m < t.a_coop.size(); ++m) {
        if (t.a_coop[m] < 0 || t.b_under[m] < 0)
            throw std::invalid_argument("RewardTable: rewards must be >= 0");
        if (t.a_coop[m] > 0 && t.b_under[m] > 0)
            throw std::invalid_argument(
                "RewardTable: state " + std::to_string(m) +
                " rewards both actions; the threshold split allows at most one");
    }
}

/// Channel observation available to the SU at the end of a slot: the exact
/// state overheard from SNR feedback, or nothing when the PU was silent.
struct Observation {
    std::optional<int> feedback_state;
    static Observation feedback(int m) { return {m}; }
    static Observation none() { return {std::nullopt}; }
};

/// Belief propagation through the transition matrix: feedback pins the
/// belief to the observed state's row, no feedback averages the current
/// belief over all transitions.
inline BeliefVector update_belief(const BeliefVector& belief, const FsmcModel& model,
                                  const Observation& obs) {
    const std::size_t m_count = model.u.size();
    if (obs.feedback_state) {
        const int m = *obs.feedback_state;
        if (m < 0 || static_cast<std::size_t>(m) >= m_count)
            throw std::invalid_argument("update_belief: feedback state out of range");
        return model.u[m];
    }
    if (belief.size() != m_count)
        throw std::invalid_argument("update_belief: belief length mismatch");
    BeliefVector next(m_count, 0.0);
    for (std::size_t m = 0; m < m_count; ++m) {
        if (belief[m] == 0.0)
            continue;
        for (std::size_t l = (m == 0 ? 0 : m - 1); l < std::min(m + 2, m_count); ++l)
            next[l] += belief[m] * model.u[m][l];
    }
    return next;
}

inline double expected_reward(const BeliefVector& belief, const RewardTable& table,
                              Action action) {
    const auto& col = action == Action::Cooperate ? table.a_coop : table.b_under;
    if (belief.size() != col.size())
        throw std::invalid_argument("expected_reward: length mismatch");
    double r = 0.0;
    for (std::size_t m = 0; m < belief.size(); ++m)
        r += belief[m] * col[m];
    return r;
}

/// Picks the action with the higher expected reward; ties protect the PU.
inline Action choose_action(const BeliefVector& belief, const RewardTable& table) {
    return expected_reward(belief, table, Action::Underlay) >
                   expected_reward(belief, table, Action::Cooperate)
               ? Action::Underlay
               : Action::Cooperate;
}

enum class Policy { Hybrid, ConventionalCooperation, NonCooperative };

inline std::string to_string(Policy p) {
    switch (p) {
    case Policy::Hybrid: return "hybrid";
    case Policy::ConventionalCooperation: return "conventional";
    case Policy::NonCooperative: return "noncooperative";
    }
    return "?";
}

/// Chapter-level configuration of the hybrid access simulation. The SU's
/// own queue is backlogged; SU throughput is own packets delivered per slot.
struct HybridConfig {
    FsmcConfig fsmc;            ///< PU direct link (mean gamma0 = gamma_op)
    double gamma_os = 31622.7766016838; ///< SU -> destination mean SNR (45 dB)
    double gamma_ops = 100.0;   ///< PU source -> SU mean SNR (20 dB)
    double r_p = 3.5;           ///< PU target spectral efficiency, bps/Hz
    double r_s = 3.5;           ///< SU target spectral efficiency, bps/Hz
    double psi = 0.2;           ///< underlay power as a fraction of overlay power
    double iota = 2.0;          ///< interference-to-noise coefficient
    RewardTable rewards = RewardTable::defaults();
    double lambda_p = 0.5;
    std::uint64_t slots = 200000;
    std::uint64_t seed = 1;
    std::uint64_t warmup = 20000;
    Policy policy = Policy::Hybrid;
};

inline void validate(const HybridConfig& cfg) {
    validate(cfg.fsmc);
    validate(cfg.rewards);
    if (static_cast<int>(cfg.rewards.a_coop.size()) != cfg.fsmc.m_levels)
        throw std::invalid_argument("HybridConfig: reward table must cover all states");
    if (!(cfg.psi >= 0.0 && cfg.psi <= 1.0))
        throw std::invalid_argument("HybridConfig: psi must be in [0,1]");
    if (cfg.iota < 0.0)
        throw std::invalid_argument("HybridConfig: iota must be >= 0");
    if (cfg.gamma_os <= 0 || cfg.gamma_ops <= 0)
        throw std::invalid_argument("HybridConfig: link SNRs must be > 0");
    if (!(cfg.lambda_p >= 0.0 && cfg.lambda_p <= 1.0))
        throw std::invalid_argument("HybridConfig: lambda_p must be in [0,1]");
    if (cfg.slots <= cfg.warmup)
        throw std::invalid_argument("HybridConfig: slots must exceed warmup");
}

namespace detail {
enum HybridStream : std::uint64_t {
    kHyFsmc = 101,
    kHyArrival = 102,
    kHyDecode = 103,
    kHySuLink = 104,
    kHyRelayLink = 105,
    kHyInit = 106,
};

inline int sample_initial_state(const FsmcModel& model, double draw) {
    double cum = 0.0;
    const int m_count = static_cast<int>(model.pi.size());
    for (int m = 0; m < m_count; ++m) {
        cum += model.pi[m];
        if (draw < cum)
            return m;
    }
    return m_count - 1;
}
} // namespace detail

/// Slotted simulation of one access policy over the FSMC link. Overlay
/// slots (PU idle) serve the relay queue first, then the SU's backlogged
/// own data; busy slots run the belief-driven mode selection (Hybrid),
/// always cooperate (Conventional), or stay silent (NonCooperative).
inline SimStats run_hybrid_episode(const HybridConfig& cfg) {
    validate(cfg);
    using namespace detail;
    const FsmcModel model = build_model(cfg.fsmc);
    const double rho_p = snr_threshold(cfg.r_p);
    const double rho_s = snr_threshold(cfg.r_s);
    const int th_coop = threshold_state(model, rho_p);
    const int th_under = threshold_state(model, rho_p * (1.0 + cfg.psi * cfg.iota));
    const double p_overlay_own = std::exp(-rho_s / cfg.gamma_os);
    const double p_underlay_own =
        cfg.psi > 0.0 ? std::exp(-rho_s / (cfg.psi * cfg.gamma_os)) : 0.0;
    const double p_relay = std::exp(-rho_p / cfg.fsmc.gamma0);
    const double p_decode = std::exp(-rho_p / cfg.gamma_ops);

    int state = sample_initial_state(model, rng::uniform(cfg.seed, 0, kHyInit));
    BeliefVector belief = model.pi;
    std::uint64_t qp = 0, qps = 0;

    const std::uint64_t n_stats = cfg.slots - cfg.warmup;
    std::uint64_t su_delivered = 0, pu_direct = 0, pu_relayed = 0;
    std::uint64_t underlay_slots = 0, cooperate_slots = 0, idle_slots = 0;
    double sum_qp = 0.0, sum_qps = 0.0;
    const int n_samples = 100;
    const std::uint64_t stride = std::max<std::uint64_t>(1, n_stats / n_samples);
    std::vector<double> samp_qp, samp_qps;

    for (std::uint64_t t = 0; t < cfg.slots; ++t) {
        const bool in_stats = t >= cfg.warmup;
        state = sample_transition(model, state, rng::uniform(cfg.seed, t, kHyFsmc));
        if (rng::bernoulli(cfg.lambda_p, cfg.seed, t, kHyArrival))
            ++qp;

        Observation obs = Observation::none();
        if (qp == 0) {
            // Overlay access at full power; relayed packets take priority.
            if (in_stats)
                ++idle_slots;
            if (qps > 0) {
                if (rng::bernoulli(p_relay, cfg.seed, t, kHyRelayLink)) {
                    --qps;
                    if (in_stats)
                        ++pu_relayed;
                }
            } else if (rng::bernoulli(p_overlay_own, cfg.seed, t, kHySuLink)) {
                if (in_stats)
                    ++su_delivered;
            }
        } else {
            const Action action = cfg.policy == Policy::Hybrid
                                      ? choose_action(belief, cfg.rewards)
                                      : Action::Cooperate;
            if (cfg.policy == Policy::Hybrid && action == Action::Underlay) {
                if (in_stats)
                    ++underlay_slots;
                if (rng::bernoulli(p_underlay_own, cfg.seed, t, kHySuLink) && in_stats)
                    ++su_delivered;
                if (state >= th_under) {
                    --qp;
                    if (in_stats)
                        ++pu_direct;
                }
            } else {
                if (in_stats)
                    ++cooperate_slots;
                if (state >= th_coop) {
                    --qp;
                    if (in_stats)
                        ++pu_direct;
                } else if (cfg.policy != Policy::NonCooperative &&
                           rng::bernoulli(p_decode, cfg.seed, t, kHyDecode)) {
                    --qp;
                    ++qps;
                }
            }
            obs = Observation::feedback(state);
        }

        if (cfg.policy == Policy::Hybrid)
            belief = update_belief(belief, model, obs);

        if (in_stats) {
            sum_qp += qp;
            sum_qps += qps;
            const std::uint64_t rel = t - cfg.warmup;
            if (rel % stride == 0 && samp_qp.size() < n_samples) {
                samp_qp.push_back(static_cast<double>(qp));
                samp_qps.push_back(static_cast<double>(qps));
            }
        }
    }

    const double n = static_cast<double>(n_stats);
    SimStats st;
    st.slots = cfg.slots;
    st.warmup = cfg.warmup;
    st.delivered_pu = (pu_direct + pu_relayed) / n;
    st.delivered_su = su_delivered / n;
    st.mean_qlen["Qp"] = sum_qp / n;
    st.mean_qlen["Qps"] = sum_qps / n;
    st.growth_slope["Qp"] = detail::ls_slope(samp_qp, static_cast<double>(stride));
    st.growth_slope["Qps"] = detail::ls_slope(samp_qps, static_cast<double>(stride));
    st.aux["underlay_fraction"] = underlay_slots / n;
    st.aux["cooperate_fraction"] = cooperate_slots / n;
    st.aux["idle_fraction"] = idle_slots / n;
    return st;
}

struct CurveRow {
    Policy policy;
    double psi;
    double lambda_p;
    double su_throughput;
    double pu_throughput;
};

/// One episode per (policy, lambda_p); all runs share the template's seed so
/// policies are compared under common random numbers.
inline std::vector<CurveRow> throughput_curve(const HybridConfig& base,
                                              const std::vector<double>& lambda_p_grid,
                                              const std::vector<Policy>& policies) {
    std::vector<CurveRow> rows;
    rows.reserve(policies.size() * lambda_p_grid.size());
    for (Policy policy : policies)
        for (double lp : lambda_p_grid) {
            HybridConfig cfg = base;
            cfg.policy = policy;
            cfg.lambda_p = lp;
            const SimStats st = run_hybrid_episode(cfg);
            rows.push_back({policy, cfg.psi, lp, st.delivered_su, st.delivered_pu});
        }
    return rows;
}

} // namespace crn
