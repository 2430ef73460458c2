#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include "fxap/errors.hpp"

namespace fxap {

// Uniform integer in [0, n). The rejection mapping is pinned here instead of
// delegating to std::uniform_int_distribution, whose draws differ between
// standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
    std::uint64_t x = rng();
    while (x < threshold) x = rng();
    return x % n;
}

// Standard-normal sampler: std::mt19937_64 feeding a Box-Muller transform.
// Uniforms take the top 53 bits; u1 is shifted into (0,1] so log(u1) stays
// finite. This is the one random source in the library -- every stream is
// reproducible from its seed.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Shared engine for integer draws that belong to the same seeded stream.
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

struct WhiteGaussian {
    double sigma = 1.0;
};

// x(n) = a * x(n-1) + sigma * g(n), started from x(-1) = 0.
struct Ar1 {
    double a = 0.9;
    double sigma = 1.0;
};

using NoiseModel = std::variant<WhiteGaussian, Ar1>;

inline void validate(const NoiseModel& model) {
    if (const auto* w = std::get_if<WhiteGaussian>(&model)) {
        if (!(w->sigma > 0.0) || !std::isfinite(w->sigma))
            throw config_error("noise model: sigma must be positive and finite");
        return;
    }
    const auto& m = std::get<Ar1>(model);
    if (!(m.sigma > 0.0) || !std::isfinite(m.sigma))
        throw config_error("noise model: sigma must be positive and finite");
    if (!(std::abs(m.a) < 1.0))
        throw config_error("noise model: ar1 coefficient must satisfy |a| < 1");
}

// Stationary variance of the model (used for SNR-relative noise floors).
inline double stationary_variance(const NoiseModel& model) {
    if (const auto* w = std::get_if<WhiteGaussian>(&model)) return w->sigma * w->sigma;
    const auto& m = std::get<Ar1>(model);
    return m.sigma * m.sigma / (1.0 - m.a * m.a);
}

class NoiseGenerator {
public:
    NoiseGenerator(std::uint64_t seed, NoiseModel model)
        : gauss_(seed), model_(model) {
        validate(model_);
    }

    double next() {
        if (const auto* w = std::get_if<WhiteGaussian>(&model_))
            return w->sigma * gauss_.next();
        const auto& m = std::get<Ar1>(model_);
        state_ = m.a * state_ + m.sigma * gauss_.next();
        return state_;
    }

private:
    GaussianSampler gauss_;
    NoiseModel model_;
    double state_ = 0.0;
};

inline std::vector<double> generate_noise(std::uint64_t seed, std::size_t count,
                                          const NoiseModel& model) {
    NoiseGenerator gen(seed, model);
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(gen.next());
    return out;
}

} // namespace fxap
