#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fxap/algorithms.hpp"
#include "fxap/delay_line.hpp"
#include "fxap/errors.hpp"
#include "fxap/impulse_response.hpp"
#include "fxap/regressor.hpp"

namespace fxap {

// Per-step outputs. The spans alias simulator state and stay valid until the
// next step() call.
struct StepOutputs {
    double y = 0.0; // adaptive filter output
    double e = 0.0; // measured error after the physical secondary path
    std::span<const double> e_hat; // modified error vector, K entries
    std::span<const double> d_hat; // reconstructed desired-signal vector, K entries
};

// Modified filtered-x simulation loop, one sample per step():
//
//   x --+--[plant p]----------------------------(+)--> d
//       |                                        |
//       +--[w(n)]--> y --[secondary s]------->(-)+--> e  (+ sensor noise)
//       |                                        |
//       +--[ŝ]--> x_f --> U_f(n)                 |
//                                                |
//   d̂(n-k) = e(n-k) + [ŝ*y](n-k)   k = 0..K-1 <--+
//   ŷ = U_f(n) w(n)        (current weights -- the modified-FX property)
//   ê = d̂ - ŷ
//   w(n+1): MFX variants consume ê, FxAP consumes the measured e-history.
//
// The e and ŝ*y histories store values as they were computed at the time, so
// a secondary-path switch mid-run leaves past entries untouched and no state
// is reset.
class MfxSimulator {
public:
    MfxSimulator(int filter_length, int order, std::size_t x_capacity,
                 std::size_t y_capacity)
        : filter_length_(filter_length),
          order_(order),
          w_(std::size_t(filter_length), 0.0),
          x_line_(std::max(x_capacity, std::size_t(filter_length))),
          y_line_(std::max<std::size_t>(y_capacity, 1)),
          reg_(order, filter_length),
          e_hist_(std::size_t(order)),
          syhat_hist_(std::size_t(order)),
          d_hat_(std::size_t(order), 0.0),
          y_hat_(std::size_t(order), 0.0),
          e_hat_(std::size_t(order), 0.0),
          e_meas_(std::size_t(order), 0.0) {}

    StepOutputs step(double x, const ImpulseResponse& p, const ImpulseResponse& s,
                     const ImpulseResponse& s_hat, const AlgorithmConfig& cfg,
                     double noise = 0.0) {
        if (p.size() > x_line_.size() || s_hat.size() > x_line_.size())
            throw config_error("simulator: input history shorter than a path");
        if (s.size() > y_line_.size() || s_hat.size() > y_line_.size())
            throw config_error("simulator: output history shorter than the secondary path");
        if (cfg.order != order_)
            throw config_error("simulator: projection order does not match construction");

        x_line_.push(x);
        const double d = x_line_.dot(p.taps());

        const double y = x_line_.dot(w_);
        y_line_.push(y);

        const double e = d - y_line_.dot(s.taps()) + noise;
        if (!std::isfinite(e))
            throw divergence_error("non-finite error signal", iteration_, cfg.mu,
                                   to_string(cfg.variant));

        reg_.push(x_line_.dot(s_hat.taps()));
        syhat_hist_.push(y_line_.dot(s_hat.taps()));
        e_hist_.push(e);

        for (int k = 0; k < order_; ++k) {
            e_meas_[std::size_t(k)] = e_hist_[std::size_t(k)];
            d_hat_[std::size_t(k)] = e_meas_[std::size_t(k)] + syhat_hist_[std::size_t(k)];
        }
        reg_.apply(w_, y_hat_);
        for (int k = 0; k < order_; ++k)
            e_hat_[std::size_t(k)] = d_hat_[std::size_t(k)] - y_hat_[std::size_t(k)];

        const bool fx = cfg.variant == Variant::fxap;
        apply_update(w_, reg_, fx ? e_meas_ : e_hat_, cfg, iteration_);

        ++iteration_;
        return {y, e, e_hat_, d_hat_};
    }

    const std::vector<double>& weights() const { return w_; }
    std::vector<double>& weights() { return w_; }
    const FilteredRegressor& regressor() const { return reg_; }
    long iteration() const { return iteration_; }

private:
    int filter_length_;
    int order_;
    long iteration_ = 0;
    std::vector<double> w_;
    DelayLine x_line_;
    DelayLine y_line_;
    FilteredRegressor reg_;
    DelayLine e_hist_;
    DelayLine syhat_hist_;
    std::vector<double> d_hat_, y_hat_, e_hat_, e_meas_;
};

// ||w - w_o||^2 / ||w_o||^2.
inline double msd_linear(std::span<const double> w, const ImpulseResponse& w_o) {
    if (w.size() != w_o.size())
        throw config_error("msd: weight and reference lengths differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d = w[i] - w_o[i];
        num += d * d;
        den += w_o[i] * w_o[i];
    }
    if (den == 0.0) throw config_error("msd: reference vector is all-zero");
    return num / den;
}

inline constexpr double kMsdFloorDb = -300.0;

// Normalized deviation in dB: 0 dB means no adaptation from w = 0; an exact
// match is reported as the -300 dB floor.
inline double msd_db(std::span<const double> w, const ImpulseResponse& w_o) {
    const double r = msd_linear(w, w_o);
    if (r <= 0.0) return kMsdFloorDb;
    return std::max(10.0 * std::log10(r), kMsdFloorDb);
}

} // namespace fxap
