#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "fxap/errors.hpp"
#include "fxap/noise.hpp"

namespace fxap {

// Finite FIR path: a primary/secondary acoustic path or the ground-truth
// plant an adaptive filter is asked to identify.
class ImpulseResponse {
public:
    ImpulseResponse() = default;

    explicit ImpulseResponse(std::vector<double> taps) : taps_(std::move(taps)) {
        if (taps_.empty())
            throw config_error("impulse response: needs at least one tap");
        for (double t : taps_)
            if (!std::isfinite(t))
                throw config_error("impulse response: non-finite tap");
    }

    const std::vector<double>& taps() const { return taps_; }
    std::size_t size() const { return taps_.size(); }
    double operator[](std::size_t i) const { return taps_[i]; }

private:
    std::vector<double> taps_;
};

// Nonzero-count / length, kept as an exact integer pair.
struct Density {
    long nonzero = 0;
    long length = 0;

    double value() const { return length > 0 ? double(nonzero) / double(length) : 0.0; }
    friend bool operator==(const Density&, const Density&) = default;
};

// Taps written as literal zeros count as zero; everything else is nonzero.
inline Density density(const ImpulseResponse& h) {
    long count = 0;
    for (double t : h.taps())
        if (t != 0.0) ++count;
    return {count, static_cast<long>(h.size())};
}

// Unit tap at index 3 (the "fourth coefficient"), zeros elsewhere.
inline ImpulseResponse make_sparse(long length) {
    if (length < 4)
        throw config_error("make_sparse: length must be at least 4");
    std::vector<double> taps(static_cast<std::size_t>(length), 0.0);
    taps[3] = 1.0;
    return ImpulseResponse(std::move(taps));
}

// Seeded surrogate for a measured room response: round(density*length)
// nonzero taps at random positions, zero-mean values under an exponentially
// decaying envelope (decay constant length/4), normalized to unit 2-norm.
inline ImpulseResponse make_nonsparse(long length, double target_density,
                                      std::uint64_t seed) {
    if (length < 1)
        throw config_error("make_nonsparse: length must be positive");
    if (!(target_density > 0.0) || target_density > 1.0)
        throw config_error("make_nonsparse: density must lie in (0, 1]");
    const long m = std::lround(target_density * double(length));
    if (m < 1 || m > length)
        throw config_error("make_nonsparse: density rounds to an invalid tap count");

    GaussianSampler gauss(seed);
    std::vector<long> idx(static_cast<std::size_t>(length));
    std::iota(idx.begin(), idx.end(), 0L);
    for (long i = 0; i < m; ++i) {
        const long j =
            i + static_cast<long>(uniform_below(gauss.engine(), std::uint64_t(length - i)));
        std::swap(idx[std::size_t(i)], idx[std::size_t(j)]);
    }
    idx.resize(static_cast<std::size_t>(m));
    std::sort(idx.begin(), idx.end());

    std::vector<double> taps(static_cast<std::size_t>(length), 0.0);
    const double tau = double(length) / 4.0;
    for (long p : idx) {
        double g = gauss.next();
        while (g == 0.0) g = gauss.next();
        taps[std::size_t(p)] = g * std::exp(-double(p) / tau);
    }
    double norm2 = 0.0;
    for (double t : taps) norm2 += t * t;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& t : taps) t *= inv;
    return ImpulseResponse(std::move(taps));
}

// Keeps a seeded-random subset of the base's nonzero taps, of size
// round(density*length); survivors keep their values, the rest become zero.
inline ImpulseResponse make_partially_sparse(const ImpulseResponse& base,
                                             double target_density,
                                             std::uint64_t seed) {
    const long length = static_cast<long>(base.size());
    const Density base_density = density(base);
    const long keep = std::lround(target_density * double(length));
    if (keep < 0 || keep > base_density.nonzero)
        throw config_error(
            "make_partially_sparse: requested density exceeds base density");

    std::vector<long> support;
    support.reserve(std::size_t(base_density.nonzero));
    for (long i = 0; i < length; ++i)
        if (base[std::size_t(i)] != 0.0) support.push_back(i);

    std::mt19937_64 rng(seed);
    for (long i = 0; i < keep; ++i) {
        const long j = i + static_cast<long>(
                               uniform_below(rng, std::uint64_t(support.size()) - std::uint64_t(i)));
        std::swap(support[std::size_t(i)], support[std::size_t(j)]);
    }
    support.resize(std::size_t(keep));

    std::vector<double> taps(static_cast<std::size_t>(length), 0.0);
    for (long p : support) taps[std::size_t(p)] = base[std::size_t(p)];
    return ImpulseResponse(std::move(taps));
}

// Full linear convolution, output length len(a) + len(b) - 1.
inline ImpulseResponse convolve(const ImpulseResponse& a, const ImpulseResponse& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return ImpulseResponse(std::move(out));
}

// Plain-text form: '#' comment header, one tap per line at 17 significant
// digits (enough for a bit-exact double round trip).
inline void to_text(const ImpulseResponse& h, std::ostream& out) {
    const Density d = density(h);
    out << "# impulse response\n"
        << "# length " << h.size() << " density " << d.nonzero << "/" << d.length
        << "\n";
    char buf[40];
    for (double t : h.taps()) {
        std::snprintf(buf, sizeof buf, "%.17g", t);
        out << buf << "\n";
    }
}

inline ImpulseResponse from_text(std::istream& in) {
    std::vector<double> taps;
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str() + pos, &end);
        if (end == line.c_str() + pos)
            throw config_error("impulse response text: unparsable line: " + line);
        taps.push_back(v);
    }
    return ImpulseResponse(std::move(taps));
}

inline void save_text(const ImpulseResponse& h, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open for writing: " + path);
    to_text(h, f);
}

inline ImpulseResponse load_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open for reading: " + path);
    return from_text(f);
}

} // namespace fxap
