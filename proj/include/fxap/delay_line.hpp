#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "fxap/errors.hpp"

namespace fxap {

// Fixed-length tapped delay line. Index 0 is the most recent sample, index k
// the sample pushed k steps ago. Backed by a ring buffer; dot products walk
// at most two contiguous segments, so accumulation is always in ascending
// tap order (the order every convolution in this library is defined in).
class DelayLine {
public:
    explicit DelayLine(std::size_t length) : buf_(length, 0.0) {
        if (length == 0) throw config_error("delay line: length must be positive");
    }

    std::size_t size() const { return buf_.size(); }

    void push(double x) {
        head_ = (head_ == 0 ? buf_.size() : head_) - 1;
        buf_[head_] = x;
    }

    // k-th most recent sample.
    double operator[](std::size_t k) const {
        assert(k < buf_.size());
        std::size_t i = head_ + k;
        if (i >= buf_.size()) i -= buf_.size();
        return buf_[i];
    }

    // Sum over m of taps[m] * line[m], m ascending.
    double dot(std::span<const double> taps) const {
        assert(taps.size() <= buf_.size());
        double acc = 0.0;
        const std::size_t first = std::min(taps.size(), buf_.size() - head_);
        for (std::size_t m = 0; m < first; ++m) acc += taps[m] * buf_[head_ + m];
        for (std::size_t m = first; m < taps.size(); ++m) acc += taps[m] * buf_[m - first];
        return acc;
    }

    void reset() {
        std::fill(buf_.begin(), buf_.end(), 0.0);
        head_ = 0;
    }

private:
    std::vector<double> buf_;
    std::size_t head_ = 0;
};

// One streaming FIR output: sum over m of h[m] * x(n-m), where the line
// already holds x(n) at index 0.
inline double fir_filter_step(const DelayLine& line, std::span<const double> h) {
    if (h.size() > line.size())
        throw config_error("fir_filter_step: delay line shorter than filter");
    return line.dot(h);
}

} // namespace fxap
