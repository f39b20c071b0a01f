#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace crn {

/// Finite-state Markov model of a Rayleigh-faded link, quantized into M SNR
/// levels with adjacent-only transitions driven by the level crossing rate.
struct FsmcConfig {
    int m_levels = 8;        ///< number of SNR states M
    double eta = 3e6;        ///< level spacing in achievable rate, bits/s
    double bandwidth = 5e6;  ///< channel bandwidth, Hz
    double gamma0 = 31.6227766016838; ///< mean SNR, linear (15 dB)
    double speed = 2.0;      ///< terminal speed, m/s
    double carrier = 5e7;    ///< carrier frequency, Hz (10 x bandwidth)
    double tau_pkt = 0.1;    ///< packet duration, s
    double doppler_override = 0.0; ///< >0 replaces the derived Doppler shift
};

struct FsmcModel {
    std::vector<double> levels;   ///< SNR thresholds, levels[0] = 0, increasing
    std::vector<double> pi;       ///< steady-state distribution
    std::vector<double> crossing; ///< level crossing rates, 1/s
    std::vector<std::vector<double>> u; ///< tridiagonal transition matrix
    double doppler = 0.0;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline void validate(const FsmcConfig& cfg) {
    if (cfg.m_levels < 2)
        throw std::invalid_argument("FsmcConfig: m_levels must be >= 2");
    if (cfg.eta <= 0 || cfg.bandwidth <= 0 || cfg.gamma0 <= 0 || cfg.speed <= 0 ||
        cfg.carrier <= 0 || cfg.tau_pkt <= 0)
        throw std::invalid_argument("FsmcConfig: all physical quantities must be > 0");
}

/// Builds the quantized model: thresholds exp(m*eta/B) - 1, exponential-SNR
/// steady state, crossing-rate transitions, diagonal completing each row.
/// Throws "transition overflow" when tau_pkt is too large for the Doppler
/// regime to keep the rows stochastic.
inline FsmcModel build_model(const FsmcConfig& cfg) {
    validate(cfg);
    const int m_count = cfg.m_levels;
    FsmcModel model;
    model.doppler = cfg.doppler_override > 0.0
                        ? cfg.doppler_override
                        : cfg.speed * cfg.carrier / 2.998e8;

    model.levels.resize(m_count);
    for (int m = 0; m < m_count; ++m)
        model.levels[m] = std::exp(m * cfg.eta / cfg.bandwidth) - 1.0;

    // Survival values exp(-Gamma_m / gamma0); the state above the top
    // threshold integrates to +infinity.
    std::vector<double> surv(m_count + 1, 0.0);
    for (int m = 0; m < m_count; ++m)
        surv[m] = std::exp(-model.levels[m] / cfg.gamma0);
    model.pi.resize(m_count);
    for (int m = 0; m < m_count; ++m)
        model.pi[m] = surv[m] - surv[m + 1];

    model.crossing.resize(m_count);
    for (int m = 0; m < m_count; ++m)
        model.crossing[m] =
            std::sqrt(2.0 * std::numbers::pi * model.levels[m] / cfg.gamma0) *
            model.doppler * surv[m];

    model.u.assign(m_count, std::vector<double>(m_count, 0.0));
    for (int m = 0; m < m_count; ++m) {
        double off = 0.0;
        if (m + 1 < m_count) {
            const double up = model.crossing[m + 1] * cfg.tau_pkt / model.pi[m];
            if (up > 1.0)
                throw std::domain_error("build_model: transition overflow (tau_pkt too large)");
            model.u[m][m + 1] = up;
            off += up;
        }
        if (m > 0) {
            const double down = model.crossing[m] * cfg.tau_pkt / model.pi[m];
            if (down > 1.0)
                throw std::domain_error("build_model: transition overflow (tau_pkt too large)");
            model.u[m][m - 1] = down;
            off += down;
        }
        if (off > 1.0)
            throw std::domain_error("build_model: transition overflow (tau_pkt too large)");
        model.u[m][m] = 1.0 - off;
    }
    return model;
}

/// SNR required to sustain a spectral efficiency target: 2^rate - 1.
inline double snr_threshold(double rate) {
    if (rate < 0)
        throw std::invalid_argument("snr_threshold: rate must be >= 0");
    return std::exp2(rate) - 1.0;
}

/// Outage probability of an exponential-SNR link at the given rate target.
inline double outage_probability(double gamma0, double rate) {
    if (gamma0 <= 0)
        throw std::invalid_argument("outage_probability: gamma0 must be > 0");
    return 1.0 - std::exp(-snr_threshold(rate) / gamma0);
}

/// Smallest state whose lower SNR edge reaches the threshold; M when the
/// threshold exceeds the top level.
inline int threshold_state(const FsmcModel& model, double threshold) {
    if (threshold < 0)
        throw std::invalid_argument("threshold_state: threshold must be >= 0");
    const int m_count = static_cast<int>(model.levels.size());
    for (int m = 0; m < m_count; ++m)
        if (model.levels[m] >= threshold)
            return m;
    return m_count;
}

/// Inverse-CDF step over the state's transition row, accumulated in state
/// index order (so a draw inside the diagonal mass keeps the state).
inline int sample_transition(const FsmcModel& model, int state, double draw) {
    const int m_count = static_cast<int>(model.u.size());
    if (state < 0 || state >= m_count)
        throw std::invalid_argument("sample_transition: state out of range");
    double cum = 0.0;
    int last = state;
    for (int l = std::max(0, state - 1); l <= std::min(m_count - 1, state + 1); ++l) {
        const double p = model.u[state][l];
        if (p <= 0.0)
            continue;
        cum += p;
        last = l;
        if (draw < cum)
            return l;
    }
    return last;
}

} // namespace crn
