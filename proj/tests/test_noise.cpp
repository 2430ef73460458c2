#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fxap/noise.hpp"

using fxap::Ar1;
using fxap::generate_noise;
using fxap::NoiseModel;
using fxap::WhiteGaussian;

namespace {

double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / double(x.size());
}

double variance(const std::vector<double>& x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / double(x.size());
}

double lag1_autocorr(const std::vector<double>& x) {
    const double m = mean(x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        num += (x[i] - m) * (x[i + 1] - m);
    for (double v : x) den += (v - m) * (v - m);
    return num / den;
}

} // namespace

TEST_CASE("zero count gives an empty sequence") {
    CHECK(generate_noise(7, 0, WhiteGaussian{1.0}).empty());
}

TEST_CASE("white gaussian sample statistics") {
    const auto x = generate_noise(7, 100000, WhiteGaussian{1.0});
    const double m = mean(x);
    const double v = variance(x);
    CHECK(m > -0.02);
    CHECK(m < 0.02);
    CHECK(v > 0.98);
    CHECK(v < 1.02);
    for (double s : x) REQUIRE(std::isfinite(s));
}

TEST_CASE("ar1 lag-1 autocorrelation matches the pole") {
    const auto x = generate_noise(7, 100000, Ar1{0.9, 1.0});
    const double r1 = lag1_autocorr(x);
    CHECK(r1 > 0.88);
    CHECK(r1 < 0.92);
}

TEST_CASE("ar1 satisfies its own recursion") {
    const auto x = generate_noise(3, 500, Ar1{0.5, 2.0});
    const auto g = generate_noise(3, 500, WhiteGaussian{1.0}); // same underlying stream
    double prev = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        CHECK(x[n] == 0.5 * prev + 2.0 * g[n]);
        prev = x[n];
    }
}

TEST_CASE("identical seed and model give bit-identical sequences") {
    const auto a = generate_noise(42, 4096, WhiteGaussian{0.5});
    const auto b = generate_noise(42, 4096, WhiteGaussian{0.5});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);

    const auto c = generate_noise(42, 1024, Ar1{0.3, 1.5});
    const auto d = generate_noise(42, 1024, Ar1{0.3, 1.5});
    for (std::size_t i = 0; i < c.size(); ++i) REQUIRE(c[i] == d[i]);
}

TEST_CASE("invalid model parameters are configuration errors") {
    CHECK_THROWS_AS(generate_noise(1, 10, WhiteGaussian{0.0}), fxap::config_error);
    CHECK_THROWS_AS(generate_noise(1, 10, WhiteGaussian{-1.0}), fxap::config_error);
    CHECK_THROWS_AS(generate_noise(1, 10, Ar1{1.0, 1.0}), fxap::config_error);
    CHECK_THROWS_AS(generate_noise(1, 10, Ar1{-1.5, 1.0}), fxap::config_error);
    CHECK_THROWS_AS(generate_noise(1, 10, Ar1{0.5, 0.0}), fxap::config_error);
}
