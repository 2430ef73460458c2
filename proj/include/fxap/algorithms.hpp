#pragma once

#include <cassert>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fxap/errors.hpp"
#include "fxap/regressor.hpp"

namespace fxap {

enum class Variant { fxap, mfxap, za_mfxap, rza_mfxap };

inline const char* to_string(Variant v) {
    switch (v) {
        case Variant::fxap: return "fxap";
        case Variant::mfxap: return "mfxap";
        case Variant::za_mfxap: return "za-mfxap";
        case Variant::rza_mfxap: return "rza-mfxap";
    }
    return "?";
}

// Parameters of one adaptive-filter variant. The experiment layer overrides
// mu and eps per schedule segment; rho and rho_prime are the tuned
// attraction strengths, from which the raw penalty weights are derived
// (rho = mu * alpha, rho_prime = mu * gamma * eps).
struct AlgorithmConfig {
    Variant variant = Variant::mfxap;
    double mu = 0.25;       // step size
    double delta = 0.002;   // Gram regularizer
    int order = 4;          // projection order K
    double rho = 0.0;       // zero-attraction strength (ZA)
    double rho_prime = 0.0; // reweighted zero-attraction strength (RZA)
    double eps = 10.0;      // shrinkage magnitude (RZA)

    double alpha() const { return rho / mu; }
    double gamma_eps() const { return rho_prime / mu; }
};

inline void validate(const AlgorithmConfig& cfg) {
    // mu = 0 freezes the weights, which the experiment layer permits; the
    // attraction variants need mu > 0 so the derived weights stay finite.
    if (!(cfg.mu >= 0.0) || !std::isfinite(cfg.mu))
        throw config_error("algorithm config: mu must be >= 0 and finite");
    if (cfg.variant == Variant::za_mfxap && cfg.rho > 0.0 && !(cfg.mu > 0.0))
        throw config_error("algorithm config: za-mfxap with rho > 0 needs mu > 0");
    if (cfg.variant == Variant::rza_mfxap && cfg.rho_prime > 0.0 && !(cfg.mu > 0.0))
        throw config_error("algorithm config: rza-mfxap with rho_prime > 0 needs mu > 0");
    if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta))
        throw config_error("algorithm config: delta must be positive and finite");
    if (cfg.order < 1)
        throw config_error("algorithm config: projection order must satisfy K >= 1");
    if (!(cfg.rho >= 0.0) || !std::isfinite(cfg.rho))
        throw config_error("algorithm config: rho must be >= 0 and finite");
    if (!(cfg.rho_prime >= 0.0) || !std::isfinite(cfg.rho_prime))
        throw config_error("algorithm config: rho_prime must be >= 0 and finite");
    if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps))
        throw config_error("algorithm config: eps must be positive and finite");
    if (!std::isfinite(cfg.alpha()) || !std::isfinite(cfg.gamma_eps()))
        throw config_error("algorithm config: derived attraction weights must be finite");
}

// Elementwise signum: +1 / -1 / 0.
inline std::vector<double> sgn_vec(std::span<const double> w) {
    std::vector<double> s(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        s[i] = w[i] > 0.0 ? 1.0 : (w[i] < 0.0 ? -1.0 : 0.0);
    return s;
}

// Elementwise sgn(w_i) / (1 + eps*|w_i|): full-strength attraction for taps
// well below 1/eps, vanishing attraction for large taps.
inline std::vector<double> psi(std::span<const double> w, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw config_error("psi: eps must be positive and finite");
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double s = w[i] > 0.0 ? 1.0 : (w[i] < 0.0 ? -1.0 : 0.0);
        out[i] = s / (1.0 + eps * std::abs(w[i]));
    }
    return out;
}

// One weight update, in place. All four variants run through this kernel:
// they share the data term mu * U⁺ err and differ only in the error vector
// the caller supplies (measured history for FxAP, modified error for the
// MFX family) and in the attraction terms added by ZA/RZA. With the penalty
// off the penalty branch is skipped entirely, so the reduced variants are
// bit-identical to MFxAP.
inline void apply_update(std::vector<double>& w, const FilteredRegressor& reg,
                         std::span<const double> err, const AlgorithmConfig& cfg,
                         long iteration = -1) {
    assert(static_cast<int>(w.size()) == reg.length());
    assert(static_cast<int>(err.size()) == reg.order());

    const GramFactor fac = reg.factor(cfg.delta);
    const std::vector<double> corr = fac.pseudo_apply(err);

    const bool za = cfg.variant == Variant::za_mfxap && cfg.rho != 0.0;
    const bool rza = cfg.variant == Variant::rza_mfxap && cfg.rho_prime != 0.0;
    if (!za && !rza) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = w[i] + cfg.mu * corr[i];
    } else {
        const std::vector<double> attractor = za ? sgn_vec(w) : psi(w, cfg.eps);
        const std::vector<double> excited = fac.pseudo_apply(reg.apply(attractor));
        const double strength = za ? cfg.rho : cfg.rho_prime;
        const double pull = za ? cfg.alpha() : cfg.gamma_eps();
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = w[i] + cfg.mu * corr[i] + strength * excited[i] - pull * attractor[i];
    }

    for (double x : w)
        if (!std::isfinite(x))
            throw divergence_error("non-finite weights after update", iteration, cfg.mu,
                                   to_string(cfg.variant));
}

namespace detail {
inline std::vector<double> updated(std::span<const double> w, const FilteredRegressor& reg,
                                   std::span<const double> err, const AlgorithmConfig& cfg) {
    std::vector<double> out(w.begin(), w.end());
    apply_update(out, reg, err, cfg);
    return out;
}
} // namespace detail

// w + mu * U⁺ ê.
inline std::vector<double> mfxap_update(std::span<const double> w,
                                        const FilteredRegressor& reg,
                                        std::span<const double> e_hat,
                                        const AlgorithmConfig& cfg) {
    assert(cfg.variant == Variant::mfxap);
    return detail::updated(w, reg, e_hat, cfg);
}

// Same algebra as mfxap_update; the distinction lives in which error vector
// the simulation supplies (the measured K-history instead of the modified
// error).
inline std::vector<double> fxap_update(std::span<const double> w,
                                       const FilteredRegressor& reg,
                                       std::span<const double> e_meas,
                                       const AlgorithmConfig& cfg) {
    assert(cfg.variant == Variant::fxap);
    return detail::updated(w, reg, e_meas, cfg);
}

// w + mu * U⁺ ê + rho * U⁺ U sgn(w) - alpha * sgn(w), alpha = rho / mu.
// The sign of the updated vector is approximated by the sign of the current
// one, so no fixed-point iteration is needed.
inline std::vector<double> za_mfxap_update(std::span<const double> w,
                                           const FilteredRegressor& reg,
                                           std::span<const double> e_hat,
                                           const AlgorithmConfig& cfg) {
    assert(cfg.variant == Variant::za_mfxap);
    return detail::updated(w, reg, e_hat, cfg);
}

// w + mu * U⁺ ê + rho' * U⁺ U Ψ - (rho'/mu) * Ψ with Ψ from psi(); attracts
// taps below 1/eps most strongly.
inline std::vector<double> rza_mfxap_update(std::span<const double> w,
                                            const FilteredRegressor& reg,
                                            std::span<const double> e_hat,
                                            const AlgorithmConfig& cfg) {
    assert(cfg.variant == Variant::rza_mfxap);
    return detail::updated(w, reg, e_hat, cfg);
}

} // namespace fxap
