#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fxap/algorithms.hpp"
#include "fxap/errors.hpp"
#include "fxap/impulse_response.hpp"
#include "fxap/noise.hpp"
#include "fxap/simulation.hpp"

namespace fxap {

enum class SparsityKind { sparse, partially_sparse, non_sparse };

inline const char* to_string(SparsityKind k) {
    switch (k) {
        case SparsityKind::sparse: return "sparse";
        case SparsityKind::partially_sparse: return "partially-sparse";
        case SparsityKind::non_sparse: return "non-sparse";
    }
    return "?";
}

// Density the dense reference path gets when a config does not say
// otherwise: 785/800 rescaled to the requested length.
inline double default_nonsparse_density(long length) {
    return double(std::lround(785.0 / 800.0 * double(length))) / double(length);
}

struct PathSpec {
    SparsityKind kind = SparsityKind::sparse;
    std::optional<double> density;      // target; ignored for sparse
    std::optional<double> base_density; // partially-sparse: density of the dense base
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> mask_seed; // partially-sparse subset choice
};

inline ImpulseResponse make_path(const PathSpec& spec, long length) {
    switch (spec.kind) {
        case SparsityKind::sparse:
            return make_sparse(length);
        case SparsityKind::non_sparse:
            return make_nonsparse(length, spec.density.value_or(default_nonsparse_density(length)),
                                  spec.seed);
        case SparsityKind::partially_sparse: {
            if (!spec.density)
                throw config_error("path spec: partially-sparse requires a density");
            const ImpulseResponse base = make_nonsparse(
                length, spec.base_density.value_or(default_nonsparse_density(length)), spec.seed);
            return make_partially_sparse(base, *spec.density,
                                         spec.mask_seed.value_or(spec.seed ^ 0x9E3779B97F4A7C15ULL));
        }
    }
    throw config_error("path spec: unknown kind");
}

// One schedule entry: from start-iteration onward, this secondary path (with
// its estimate set equal to it) and these step-size / shrinkage values.
struct Segment {
    long start = 0;
    PathSpec secondary;
    double mu = 0.25;
    double eps = 10.0;
};

struct SegmentSchedule {
    std::vector<Segment> segments;
    long total_iterations = 0;
};

struct VariantSpec {
    std::string label;
    AlgorithmConfig config; // mu/eps here are placeholders; segments override
};

struct MeasurementNoise {
    enum class Kind { none, sigma, snr_db } kind = Kind::none;
    double value = 0.0;
};

struct ExperimentSpec {
    int filter_length = 64;
    int secondary_length = 64;
    NoiseModel input = WhiteGaussian{1.0};
    PathSpec plant;
    SegmentSchedule schedule;
    std::vector<VariantSpec> variants;
    int trials = 1;
    std::uint64_t base_seed = 0;
    MeasurementNoise noise;
    int decimation = 10;
    std::string output_path;
    std::vector<double> thresholds{-10.0, -20.0, -30.0};
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Per-trial input-noise seed. All variants of a trial share it, so their
// curves are paired sample-for-sample.
inline std::uint64_t trial_seed(std::uint64_t base_seed, int trial) {
    return splitmix64(base_seed + 0x9E3779B97F4A7C15ULL * std::uint64_t(trial + 1));
}

// Normalized MSD per recorded iteration, in dB.
struct MsdCurve {
    std::vector<double> db;
    int decimation = 1;
};

inline MsdCurve to_db_curve(const std::vector<double>& linear, int decimation) {
    MsdCurve c;
    c.decimation = decimation;
    c.db.reserve(linear.size());
    for (double r : linear)
        c.db.push_back(r > 0.0 ? std::max(10.0 * std::log10(r), kMsdFloorDb) : kMsdFloorDb);
    return c;
}

// First recorded index at or below the threshold that stays within
// threshold + 3 dB for the following 100 recorded points (fewer when the
// curve ends first); nullopt when the curve never qualifies.
inline std::optional<long> iterations_to_threshold(const MsdCurve& curve,
                                                   double threshold_db) {
    const auto& v = curve.db;
    const long n = static_cast<long>(v.size());
    for (long i = 0; i < n; ++i) {
        if (!(v[std::size_t(i)] <= threshold_db)) continue;
        bool held = true;
        const long last = std::min(n - 1, i + 100);
        for (long j = i + 1; j <= last && held; ++j)
            held = v[std::size_t(j)] <= threshold_db + 3.0;
        if (held) return i;
    }
    return std::nullopt;
}

inline void validate_spec(const ExperimentSpec& spec);

namespace detail {

struct MaterializedSegment {
    long start = 0;
    ImpulseResponse s;     // physical secondary path; ŝ = s throughout
    ImpulseResponse p_eff; // composite primary path s * w_o
    AlgorithmConfig cfg;
    double noise_sigma = 0.0;
};

inline std::vector<MaterializedSegment> materialize_segments(
    const ExperimentSpec& spec, const ImpulseResponse& w_o,
    const AlgorithmConfig& base_cfg) {
    std::vector<MaterializedSegment> segs;
    segs.reserve(spec.schedule.segments.size());
    for (const Segment& seg : spec.schedule.segments) {
        MaterializedSegment m;
        m.start = seg.start;
        m.s = make_path(seg.secondary, spec.secondary_length);
        m.p_eff = convolve(m.s, w_o);
        m.cfg = base_cfg;
        m.cfg.mu = seg.mu;
        m.cfg.eps = seg.eps;
        switch (spec.noise.kind) {
            case MeasurementNoise::Kind::none:
                m.noise_sigma = 0.0;
                break;
            case MeasurementNoise::Kind::sigma:
                m.noise_sigma = spec.noise.value;
                break;
            case MeasurementNoise::Kind::snr_db: {
                double p2 = 0.0;
                for (double t : m.p_eff.taps()) p2 += t * t;
                const double sig_power = p2 * stationary_variance(spec.input);
                m.noise_sigma = std::sqrt(sig_power / std::pow(10.0, spec.noise.value / 10.0));
                break;
            }
        }
        segs.push_back(std::move(m));
    }
    return segs;
}

} // namespace detail

// One (variant, trial) run; returns the normalized squared deviation at
// every decimation-th iteration (post-update). Deterministic in the seed.
inline std::vector<double> run_trial_linear(const ExperimentSpec& spec,
                                            std::size_t variant_index,
                                            std::uint64_t seed) {
    const ImpulseResponse w_o = make_path(spec.plant, spec.filter_length);
    const auto segs = detail::materialize_segments(
        spec, w_o, spec.variants.at(variant_index).config);

    std::size_t x_cap = std::size_t(spec.filter_length);
    std::size_t y_cap = 1;
    for (const auto& seg : segs) {
        x_cap = std::max({x_cap, seg.p_eff.size(), seg.s.size()});
        y_cap = std::max(y_cap, seg.s.size());
    }

    MfxSimulator sim(spec.filter_length, spec.variants[variant_index].config.order,
                     x_cap, y_cap);
    NoiseGenerator input(seed, spec.input);
    NoiseGenerator sensor(splitmix64(seed ^ 0x5851F42D4C957F2DULL), WhiteGaussian{1.0});

    std::vector<double> recorded;
    const long total = spec.schedule.total_iterations;
    recorded.reserve(std::size_t((total + spec.decimation - 1) / spec.decimation));

    std::size_t cur = 0;
    for (long n = 0; n < total; ++n) {
        while (cur + 1 < segs.size() && n >= segs[cur + 1].start) ++cur;
        const auto& seg = segs[cur];
        const double v = seg.noise_sigma != 0.0 ? seg.noise_sigma * sensor.next() : 0.0;
        sim.step(input.next(), seg.p_eff, seg.s, seg.s, seg.cfg, v);
        if (n % spec.decimation == 0) recorded.push_back(msd_linear(sim.weights(), w_o));
    }
    return recorded;
}

inline MsdCurve run_trial(const ExperimentSpec& spec, std::size_t variant_index,
                          std::uint64_t seed) {
    return to_db_curve(run_trial_linear(spec, variant_index, seed), spec.decimation);
}

struct TrialFailure {
    std::string variant;
    int trial = 0;
    long iteration = 0;
    double mu = 0.0;
    std::string message;
};

struct ExperimentResult {
    std::vector<MsdCurve> curves;      // per variant, averaged over completed trials
    std::vector<int> completed_trials; // per variant
    std::vector<TrialFailure> failures;
};

using TrialObserver =
    std::function<void(std::size_t variant, int trial, const std::vector<double>& linear)>;

// Runs every (variant, trial) pair; variants share per-trial input seeds.
// Deviations are averaged in the linear domain across trials and converted
// to dB afterwards. A diverging trial is recorded and skipped; its variant's
// average covers the trials that completed.
inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       const TrialObserver& observer = {}) {
    validate_spec(spec);
    const std::size_t points =
        std::size_t((spec.schedule.total_iterations + spec.decimation - 1) / spec.decimation);

    ExperimentResult result;
    result.curves.reserve(spec.variants.size());
    result.completed_trials.assign(spec.variants.size(), 0);

    for (std::size_t vi = 0; vi < spec.variants.size(); ++vi) {
        std::vector<double> sum(points, 0.0);
        int completed = 0;
        for (int t = 0; t < spec.trials; ++t) {
            std::vector<double> linear;
            try {
                linear = run_trial_linear(spec, vi, trial_seed(spec.base_seed, t));
            } catch (const divergence_error& de) {
                result.failures.push_back({spec.variants[vi].label, t, de.iteration, de.mu,
                                           de.what()});
                continue;
            }
            if (observer) observer(vi, t, linear);
            for (std::size_t i = 0; i < points; ++i) sum[i] += linear[i];
            ++completed;
        }
        result.completed_trials[vi] = completed;
        if (completed > 0) {
            for (double& x : sum) x /= double(completed);
            result.curves.push_back(to_db_curve(sum, spec.decimation));
        } else {
            MsdCurve empty;
            empty.decimation = spec.decimation;
            empty.db.assign(points, std::nan(""));
            result.curves.push_back(std::move(empty));
        }
    }
    return result;
}

inline void validate_spec(const ExperimentSpec& spec) {
    if (spec.filter_length < 1)
        throw config_error("experiment: filter_length must be >= 1");
    if (spec.secondary_length < 1)
        throw config_error("experiment: secondary_length must be >= 1");
    validate(spec.input);
    if (spec.trials < 1) throw config_error("experiment: invariant violated: trials >= 1");
    if (spec.decimation < 1) throw config_error("experiment: decimation must be >= 1");
    if (spec.schedule.total_iterations < 0)
        throw config_error("experiment: total_iterations must be >= 0");
    if (spec.schedule.segments.empty())
        throw config_error("experiment: schedule needs at least one segment");
    long prev = -1;
    for (std::size_t i = 0; i < spec.schedule.segments.size(); ++i) {
        const Segment& seg = spec.schedule.segments[i];
        if (i == 0 && seg.start != 0)
            throw config_error(
                "experiment: invariant violated: segment starts strictly increasing, first = 0");
        if (seg.start <= prev)
            throw config_error(
                "experiment: invariant violated: segment starts strictly increasing, first = 0");
        prev = seg.start;
        if (!(seg.mu >= 0.0) || !std::isfinite(seg.mu))
            throw config_error("experiment: segment mu must be >= 0 and finite");
        if (!(seg.eps > 0.0) || !std::isfinite(seg.eps))
            throw config_error("experiment: segment eps must be positive and finite");
        make_path(seg.secondary, spec.secondary_length); // validates density vs length
    }
    if (spec.variants.empty())
        throw config_error("experiment: needs at least one variant");
    for (std::size_t i = 0; i < spec.variants.size(); ++i) {
        const VariantSpec& v = spec.variants[i];
        if (v.label.empty()) throw config_error("experiment: variant labels must be non-empty");
        for (std::size_t j = 0; j < i; ++j)
            if (spec.variants[j].label == v.label)
                throw config_error("experiment: invariant violated: labels unique (duplicate \"" +
                                   v.label + "\")");
        validate(v.config);
        if (v.config.order > spec.filter_length)
            throw config_error("experiment: projection order must satisfy K <= L");
        for (const Segment& seg : spec.schedule.segments) {
            AlgorithmConfig eff = v.config;
            eff.mu = seg.mu;
            eff.eps = seg.eps;
            validate(eff); // per-segment overrides must stay consistent
        }
    }
    if (spec.noise.kind == MeasurementNoise::Kind::sigma &&
        (!(spec.noise.value > 0.0) || !std::isfinite(spec.noise.value)))
        throw config_error("experiment: noise sigma must be positive and finite");
    if (spec.noise.kind == MeasurementNoise::Kind::snr_db && !std::isfinite(spec.noise.value))
        throw config_error("experiment: noise snr_db must be finite");
    make_path(spec.plant, spec.filter_length); // validates plant density
}

} // namespace fxap
