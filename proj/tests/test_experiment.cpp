#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fxap/experiment.hpp"
#include "oracles.hpp"

using fxap::AlgorithmConfig;
using fxap::ExperimentSpec;
using fxap::MsdCurve;
using fxap::PathSpec;
using fxap::Segment;
using fxap::SparsityKind;
using fxap::Variant;
using fxap::VariantSpec;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.filter_length = 16;
    spec.secondary_length = 16;
    spec.plant = PathSpec{SparsityKind::sparse, {}, {}, 0, {}};
    Segment seg;
    seg.secondary = PathSpec{SparsityKind::non_sparse, 0.5, {}, 7, {}};
    seg.mu = 0.5;
    spec.schedule.segments = {seg};
    spec.schedule.total_iterations = 400;
    VariantSpec v;
    v.label = "MFxAP_K2";
    v.config.variant = Variant::mfxap;
    v.config.order = 2;
    spec.variants = {v};
    spec.trials = 2;
    spec.base_seed = 99;
    spec.decimation = 10;
    return spec;
}

} // namespace

TEST_CASE("make_path dispatches by kind") {
    PathSpec sparse{SparsityKind::sparse, {}, {}, 0, {}};
    CHECK(fxap::density(make_path(sparse, 64)) == fxap::Density{1, 64});

    PathSpec dense{SparsityKind::non_sparse, {}, {}, 3, {}};
    CHECK(fxap::density(make_path(dense, 64)) == fxap::Density{63, 64});

    PathSpec partial{SparsityKind::partially_sparse, 6.0 / 64.0, {}, 3, {}};
    const auto part = make_path(partial, 64);
    CHECK(fxap::density(part) == fxap::Density{6, 64});
    // support nested inside the dense path drawn from the same seed
    const auto base = make_path(dense, 64);
    for (std::size_t i = 0; i < part.size(); ++i)
        if (part[i] != 0.0) REQUIRE(part[i] == base[i]);

    PathSpec missing{SparsityKind::partially_sparse, {}, {}, 3, {}};
    CHECK_THROWS_AS(make_path(missing, 64), fxap::config_error);
}

TEST_CASE("zero iterations give an empty curve") {
    auto spec = small_spec();
    spec.schedule.total_iterations = 0;
    const auto curve = run_trial(spec, 0, fxap::trial_seed(spec.base_seed, 0));
    CHECK(curve.db.empty());
}

TEST_CASE("frozen weights keep the msd at its initial value") {
    auto spec = small_spec();
    spec.schedule.segments[0].mu = 0.0;
    const auto curve = run_trial(spec, 0, fxap::trial_seed(spec.base_seed, 0));
    REQUIRE_FALSE(curve.db.empty());
    for (double v : curve.db) CHECK(v == 0.0); // w stays at zero exactly
}

TEST_CASE("same seed gives bit-identical curves") {
    const auto spec = small_spec();
    const auto a = run_trial(spec, 0, 1234);
    const auto b = run_trial(spec, 0, 1234);
    REQUIRE(a.db == b.db);
}

TEST_CASE("curve length is ceil(total / decimation)") {
    auto spec = small_spec();
    spec.schedule.total_iterations = 401;
    const auto curve = run_trial(spec, 0, 1);
    CHECK(curve.db.size() == 41);
    spec.schedule.total_iterations = 399;
    CHECK(run_trial(spec, 0, 1).db.size() == 40);
}

TEST_CASE("iterations_to_threshold on synthetic curves") {
    MsdCurve monotone;
    monotone.decimation = 1;
    for (int i = 0; i < 700; ++i) monotone.db.push_back(-0.04 * i); // crosses -20 at 500
    CHECK(iterations_to_threshold(monotone, -20.0) == 500);

    MsdCurve shallow;
    shallow.decimation = 1;
    shallow.db.assign(300, -5.0);
    CHECK_FALSE(iterations_to_threshold(shallow, -20.0).has_value());

    // single-point dip below threshold followed by a +10 dB jump: debounced
    MsdCurve dip;
    dip.decimation = 1;
    dip.db.assign(300, -18.0);
    dip.db[50] = -21.0;
    for (std::size_t i = 51; i < 300; ++i) dip.db[i] = -11.0;
    CHECK_FALSE(iterations_to_threshold(dip, -20.0).has_value());

    // the dip would be accepted without the +10 dB jump afterwards
    MsdCurve held;
    held.decimation = 1;
    held.db.assign(300, -18.0);
    for (std::size_t i = 50; i < 300; ++i) held.db[i] = i == 50 ? -21.0 : -19.0;
    CHECK(iterations_to_threshold(held, -20.0) == 50);
}

TEST_CASE("one trial equals the averaged experiment with one trial") {
    auto spec = small_spec();
    spec.trials = 1;
    const auto res = run_experiment(spec);
    const auto single = run_trial(spec, 0, fxap::trial_seed(spec.base_seed, 0));
    REQUIRE(res.curves.size() == 1);
    REQUIRE(res.curves[0].db == single.db);
    CHECK(res.failures.empty());
    CHECK(res.completed_trials[0] == 1);
}

TEST_CASE("averaging happens in the linear domain") {
    // Two trials with identical seeds must average to the single-trial curve
    // exactly; dB-domain averaging would only match because the curves are
    // identical, so also check a hand-built mix.
    auto spec = small_spec();
    spec.trials = 2;
    std::vector<std::vector<double>> linear;
    const auto res = run_experiment(spec, [&](std::size_t, int, const std::vector<double>& l) {
        linear.push_back(l);
    });
    REQUIRE(linear.size() == 2);
    for (std::size_t i = 0; i < res.curves[0].db.size(); ++i) {
        const double mean = 0.5 * (linear[0][i] + linear[1][i]);
        const double expect = mean > 0.0 ? std::max(10.0 * std::log10(mean), -300.0) : -300.0;
        REQUIRE(res.curves[0].db[i] == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("two trials with identical seeds equal the one-trial curve") {
    // Trials draw distinct seeds by construction, so feed the averaging path
    // the same trial twice by hand: the mean of two identical linear curves
    // must reproduce the single-trial dB curve exactly.
    auto spec = small_spec();
    spec.trials = 1;
    const auto single = run_experiment(spec).curves[0];
    const auto lin = run_trial_linear(spec, 0, fxap::trial_seed(spec.base_seed, 0));
    std::vector<double> avg(lin.size());
    for (std::size_t i = 0; i < lin.size(); ++i) avg[i] = (lin[i] + lin[i]) / 2.0;
    REQUIRE(fxap::to_db_curve(avg, spec.decimation).db == single.db);
}

TEST_CASE("variants share per-trial input seeds") {
    auto spec = small_spec();
    VariantSpec v2 = spec.variants[0];
    v2.label = "MFxAP_K4";
    v2.config.order = 4;
    spec.variants.push_back(v2);
    spec.trials = 2;

    std::vector<std::pair<std::size_t, int>> seen;
    run_experiment(spec, [&](std::size_t vi, int t, const std::vector<double>&) {
        seen.emplace_back(vi, t);
    });
    REQUIRE(seen.size() == 4);
    // seeds derive only from (base_seed, trial): check by construction
    CHECK(fxap::trial_seed(spec.base_seed, 0) == fxap::trial_seed(spec.base_seed, 0));
    CHECK(fxap::trial_seed(spec.base_seed, 0) != fxap::trial_seed(spec.base_seed, 1));
}

TEST_CASE("diverging trials are reported, not fatal") {
    auto spec = small_spec();
    spec.schedule.segments[0].mu = 50.0; // diverges quickly
    const auto res = run_experiment(spec);
    REQUIRE_FALSE(res.failures.empty());
    CHECK(res.completed_trials[0] == 0);
    CHECK(res.failures[0].variant == "MFxAP_K2");
    CHECK(res.failures[0].iteration >= 0);
    for (double v : res.curves[0].db) CHECK(std::isnan(v));
}

TEST_CASE("spec invariants are enforced") {
    auto spec = small_spec();
    spec.trials = 0;
    CHECK_THROWS_AS(validate_spec(spec), fxap::config_error);

    spec = small_spec();
    spec.variants.push_back(spec.variants[0]); // duplicate label
    CHECK_THROWS_AS(validate_spec(spec), fxap::config_error);

    spec = small_spec();
    spec.schedule.segments[0].start = 5; // first segment must start at 0
    CHECK_THROWS_AS(validate_spec(spec), fxap::config_error);

    spec = small_spec();
    spec.variants[0].config.order = 64; // K > L
    CHECK_THROWS_AS(validate_spec(spec), fxap::config_error);

    spec = small_spec();
    Segment dup = spec.schedule.segments[0];
    spec.schedule.segments.push_back(dup); // non-increasing starts
    CHECK_THROWS_AS(validate_spec(spec), fxap::config_error);
}

TEST_CASE("measurement noise changes the trajectory only when enabled") {
    auto spec = small_spec();
    const auto quiet = run_trial(spec, 0, 5);
    spec.noise.kind = fxap::MeasurementNoise::Kind::sigma;
    spec.noise.value = 0.1;
    const auto noisy = run_trial(spec, 0, 5);
    CHECK(quiet.db != noisy.db);

    spec.noise.kind = fxap::MeasurementNoise::Kind::snr_db;
    spec.noise.value = 40.0;
    const auto snr = run_trial(spec, 0, 5);
    CHECK(snr.db != quiet.db);
}
