#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fxap/errors.hpp"

namespace fxap {

class FilteredRegressor;

// Cholesky factor of (U Uᵀ + δI) for one regressor snapshot. Invalidated by
// the next push; an update that needs several solves against the same matrix
// factors once and reuses it.
class GramFactor {
public:
    // z with (U Uᵀ + δI) z = rhs.
    std::vector<double> solve(std::span<const double> rhs) const;

    // Uᵀ (U Uᵀ + δI)⁻¹ v, an L-vector.
    std::vector<double> pseudo_apply(std::span<const double> v) const;

private:
    friend class FilteredRegressor;
    GramFactor(const FilteredRegressor& reg, double delta);

    const FilteredRegressor* reg_;
    std::vector<double> chol_; // lower-triangular factor, row-major K x K
    int order_;
};

// The K x L matrix of delayed filtered-input samples. Row k holds
// [xf(n-k), ..., xf(n-k-L+1)]; consecutive rows overlap in L-1 entries, so
// the whole matrix lives in one history of K+L-1 samples (most recent
// first). push() shifts that history by one and writes the new sample at
// the head of row 0.
class FilteredRegressor {
public:
    FilteredRegressor(int order, int length) : order_(order), length_(length) {
        if (order < 1 || length < 1 || order > length)
            throw config_error("filtered regressor: need 1 <= K <= L");
        history_.assign(std::size_t(order) + std::size_t(length) - 1, 0.0);
    }

    int order() const { return order_; }
    int length() const { return length_; }

    void push(double xf) {
        std::copy_backward(history_.begin(), history_.end() - 1, history_.end());
        history_[0] = xf;
    }

    std::span<const double> row(int k) const {
        assert(k >= 0 && k < order_);
        return {history_.data() + k, std::size_t(length_)};
    }

    std::span<const double> history() const { return history_; }

    // U w: out[k] = row(k) . w, ascending tap order.
    void apply(std::span<const double> w, std::span<double> out) const {
        assert(w.size() == std::size_t(length_) && out.size() == std::size_t(order_));
        for (int k = 0; k < order_; ++k) {
            const double* r = history_.data() + k;
            double acc = 0.0;
            for (int j = 0; j < length_; ++j) acc += r[j] * w[std::size_t(j)];
            out[std::size_t(k)] = acc;
        }
    }

    std::vector<double> apply(std::span<const double> w) const {
        std::vector<double> out(std::size_t(order_), 0.0);
        apply(w, out);
        return out;
    }

    GramFactor factor(double delta) const { return GramFactor(*this, delta); }

    // z with (U Uᵀ + δI) z = rhs; Cholesky, no explicit inverse.
    std::vector<double> gram_solve(double delta, std::span<const double> rhs) const {
        return factor(delta).solve(rhs);
    }

    // Uᵀ (U Uᵀ + δI)⁻¹ v.
    std::vector<double> pseudo_apply(double delta, std::span<const double> v) const {
        return factor(delta).pseudo_apply(v);
    }

private:
    int order_;
    int length_;
    std::vector<double> history_;
};

inline GramFactor::GramFactor(const FilteredRegressor& reg, double delta)
    : reg_(&reg), order_(reg.order()) {
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw config_error("gram factor: delta must be finite and >= 0");

    const int K = order_;
    const int L = reg.length();
    const auto h = reg.history();
    chol_.assign(std::size_t(K) * std::size_t(K), 0.0);

    // Lower triangle of U Uᵀ + δI; entry (i,j) is a length-L dot of two
    // overlapping history windows, accumulated in ascending tap order.
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (int m = 0; m < L; ++m) acc += h[std::size_t(i + m)] * h[std::size_t(j + m)];
            if (i == j) acc += delta;
            chol_[std::size_t(i) * std::size_t(K) + std::size_t(j)] = acc;
        }
    }

    // In-place Cholesky.
    for (int j = 0; j < K; ++j) {
        double d = chol_[std::size_t(j) * std::size_t(K) + std::size_t(j)];
        for (int t = 0; t < j; ++t) {
            const double l = chol_[std::size_t(j) * std::size_t(K) + std::size_t(t)];
            d -= l * l;
        }
        if (!(d > 0.0) || !std::isfinite(d))
            throw numerical_error("gram solve breakdown: nonpositive or non-finite pivot at row " +
                                  std::to_string(j));
        const double root = std::sqrt(d);
        chol_[std::size_t(j) * std::size_t(K) + std::size_t(j)] = root;
        for (int i = j + 1; i < K; ++i) {
            double v = chol_[std::size_t(i) * std::size_t(K) + std::size_t(j)];
            for (int t = 0; t < j; ++t)
                v -= chol_[std::size_t(i) * std::size_t(K) + std::size_t(t)] *
                     chol_[std::size_t(j) * std::size_t(K) + std::size_t(t)];
            chol_[std::size_t(i) * std::size_t(K) + std::size_t(j)] = v / root;
        }
    }
}

inline std::vector<double> GramFactor::solve(std::span<const double> rhs) const {
    if (rhs.size() != std::size_t(order_))
        throw config_error("gram solve: rhs length must equal the projection order");
    const int K = order_;
    std::vector<double> z(rhs.begin(), rhs.end());
    for (int i = 0; i < K; ++i) {
        double v = z[std::size_t(i)];
        for (int t = 0; t < i; ++t)
            v -= chol_[std::size_t(i) * std::size_t(K) + std::size_t(t)] * z[std::size_t(t)];
        z[std::size_t(i)] = v / chol_[std::size_t(i) * std::size_t(K) + std::size_t(i)];
    }
    for (int i = K - 1; i >= 0; --i) {
        double v = z[std::size_t(i)];
        for (int t = i + 1; t < K; ++t)
            v -= chol_[std::size_t(t) * std::size_t(K) + std::size_t(i)] * z[std::size_t(t)];
        z[std::size_t(i)] = v / chol_[std::size_t(i) * std::size_t(K) + std::size_t(i)];
    }
    return z;
}

inline std::vector<double> GramFactor::pseudo_apply(std::span<const double> v) const {
    const std::vector<double> z = solve(v);
    const auto h = reg_->history();
    const int L = reg_->length();
    std::vector<double> out(std::size_t(L), 0.0);
    for (int j = 0; j < L; ++j) {
        double acc = 0.0;
        for (int k = 0; k < order_; ++k) acc += h[std::size_t(k + j)] * z[std::size_t(k)];
        out[std::size_t(j)] = acc;
    }
    return out;
}

} // namespace fxap
