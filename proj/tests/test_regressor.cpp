#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fxap/regressor.hpp"
#include "oracles.hpp"

using fxap::FilteredRegressor;

namespace {

std::vector<double> random_vector(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

} // namespace

TEST_CASE("cold-start pushes shift as defined") {
    FilteredRegressor reg(2, 2);
    reg.push(1.0);
    CHECK(reg.row(0)[0] == 1.0);
    CHECK(reg.row(0)[1] == 0.0);
    CHECK(reg.row(1)[0] == 0.0);
    CHECK(reg.row(1)[1] == 0.0);

    FilteredRegressor reg2(2, 2);
    reg2.push(2.0);
    reg2.push(3.0);
    CHECK(reg2.row(0)[0] == 3.0);
    CHECK(reg2.row(0)[1] == 2.0);
    CHECK(reg2.row(1)[0] == 2.0);
    CHECK(reg2.row(1)[1] == 0.0);
}

TEST_CASE("regressor matches a rebuild from the full sample list") {
    std::mt19937 rng(11);
    const int K = 3, L = 5;
    FilteredRegressor reg(K, L);
    std::vector<double> pushed;
    for (int i = 0; i < K + L; ++i) {
        const double x = random_vector(rng, 1)[0];
        pushed.push_back(x);
        reg.push(x);
        const auto u = oracle::build_regressor(pushed, K, L);
        for (int k = 0; k < K; ++k)
            for (int j = 0; j < L; ++j)
                REQUIRE(reg.row(k)[std::size_t(j)] == u[std::size_t(k)][std::size_t(j)]);
    }
}

TEST_CASE("Hankel consistency holds after any push sequence") {
    std::mt19937 rng(12);
    FilteredRegressor reg(4, 9);
    for (int i = 0; i < 50; ++i) {
        reg.push(random_vector(rng, 1)[0]);
        for (int k = 0; k + 1 < reg.order(); ++k)
            for (int j = 0; j + k + 1 < reg.length(); ++j)
                REQUIRE(reg.row(k + 1)[std::size_t(j)] == reg.row(0)[std::size_t(j + k + 1)]);
    }
}

TEST_CASE("regressor enforces 1 <= K <= L") {
    CHECK_THROWS_AS(FilteredRegressor(0, 4), fxap::config_error);
    CHECK_THROWS_AS(FilteredRegressor(5, 4), fxap::config_error);
    CHECK_THROWS_AS(FilteredRegressor(1, 0), fxap::config_error);
}

TEST_CASE("gram solve with identity rows is the identity") {
    FilteredRegressor reg(2, 2);
    // history [1, 0, 1] makes rows [1,0] and [0,1]
    reg.push(1.0);
    reg.push(0.0);
    reg.push(1.0);
    const std::vector<double> rhs{3.0, 4.0};
    const auto z = reg.gram_solve(0.0, rhs);
    CHECK(z[0] == Catch::Approx(3.0).margin(1e-15));
    CHECK(z[1] == Catch::Approx(4.0).margin(1e-15));
}

TEST_CASE("scalar gram solve") {
    FilteredRegressor reg(1, 2);
    reg.push(1.0);
    reg.push(1.0);
    const std::vector<double> rhs{1.0};
    const auto z = reg.gram_solve(0.002, rhs);
    CHECK(z[0] == Catch::Approx(1.0 / 2.002).margin(1e-15));
}

TEST_CASE("gram solve matches the explicit inverse") {
    std::mt19937 rng(13);
    const int K = 8, L = 32;
    FilteredRegressor reg(K, L);
    std::vector<double> pushed;
    for (int i = 0; i < L + K; ++i) {
        const double x = random_vector(rng, 1)[0];
        pushed.push_back(x);
        reg.push(x);
    }
    const auto rhs = random_vector(rng, K);
    const auto z = reg.gram_solve(0.002, rhs);

    const auto u = oracle::build_regressor(pushed, K, L);
    const auto expect = oracle::matvec(oracle::gram_inverse(u, 0.002), rhs);
    CHECK(oracle::max_abs_diff(z, expect) < 1e-10);
}

TEST_CASE("gram solve residual stays small on random instances") {
    std::mt19937 rng(14);
    for (int trial = 0; trial < 40; ++trial) {
        const int K = 1 + int(rng() % 16);
        const int L = K + int(rng() % (256 - K + 1));
        FilteredRegressor reg(K, L);
        std::vector<double> pushed;
        for (int i = 0; i < L + K; ++i) {
            const double x = random_vector(rng, 1)[0];
            pushed.push_back(x);
            reg.push(x);
        }
        const double delta = 0.002;
        const auto rhs = random_vector(rng, std::size_t(K));
        const auto z = reg.gram_solve(delta, rhs);

        // residual against the directly built matrix
        const auto u = oracle::build_regressor(pushed, K, L);
        auto g = oracle::matmul(u, oracle::transpose(u));
        for (int i = 0; i < K; ++i) g[std::size_t(i)][std::size_t(i)] += delta;
        double rinf = 0.0, binf = 0.0;
        for (int i = 0; i < K; ++i) {
            double acc = 0.0;
            for (int j = 0; j < K; ++j) acc += g[std::size_t(i)][std::size_t(j)] * z[std::size_t(j)];
            rinf = std::max(rinf, std::abs(acc - rhs[std::size_t(i)]));
            binf = std::max(binf, std::abs(rhs[std::size_t(i)]));
        }
        REQUIRE(rinf <= 1e-9 * (1.0 + binf));
    }
}

TEST_CASE("gram solve breaks down on an exactly singular matrix") {
    FilteredRegressor reg(2, 2); // all-zero history, delta = 0
    const std::vector<double> rhs{1.0, 1.0};
    CHECK_THROWS_AS(reg.gram_solve(0.0, rhs), fxap::numerical_error);
}

TEST_CASE("pseudo apply of a zero vector is zero") {
    std::mt19937 rng(15);
    FilteredRegressor reg(3, 6);
    for (int i = 0; i < 10; ++i) reg.push(random_vector(rng, 1)[0]);
    const std::vector<double> v(3, 0.0);
    for (double x : reg.pseudo_apply(0.01, v)) CHECK(x == 0.0);
}

TEST_CASE("pseudo apply projects onto a single row") {
    FilteredRegressor reg(1, 2);
    reg.push(0.0);
    reg.push(1.0); // row = [1, 0]
    const std::vector<double> v{2.0};
    const auto out = reg.pseudo_apply(0.0, v);
    CHECK(out[0] == Catch::Approx(2.0).margin(1e-15));
    CHECK(out[1] == 0.0);
}

TEST_CASE("pseudo apply matches the explicit pseudo-inverse") {
    std::mt19937 rng(16);
    for (int trial = 0; trial < 25; ++trial) {
        const int K = 1 + int(rng() % 8);
        const int L = K + int(rng() % 32);
        FilteredRegressor reg(K, L);
        std::vector<double> pushed;
        for (int i = 0; i < L + K + int(rng() % 5); ++i) {
            const double x = random_vector(rng, 1)[0];
            pushed.push_back(x);
            reg.push(x);
        }
        const auto v = random_vector(rng, std::size_t(K));
        const auto got = reg.pseudo_apply(0.002, v);
        const auto u = oracle::build_regressor(pushed, K, L);
        const auto expect = oracle::pseudo_apply(u, 0.002, v);
        REQUIRE(oracle::max_abs_diff(got, expect) < 1e-10);
    }
}
