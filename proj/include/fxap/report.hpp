#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fxap/errors.hpp"
#include "fxap/experiment.hpp"

namespace fxap {

// Wide CSV: one iteration column plus one column per variant, 9 significant
// digits, LF line endings, no trailing separator. Identical inputs produce
// byte-identical files.
inline void write_csv(std::ostream& out, const std::vector<std::string>& labels,
                      const std::vector<MsdCurve>& curves) {
    if (labels.size() != curves.size())
        throw config_error("csv: one label per curve required");
    std::size_t rows = 0;
    int decimation = 1;
    if (!curves.empty()) {
        rows = curves.front().db.size();
        decimation = curves.front().decimation;
        for (const auto& c : curves)
            if (c.db.size() != rows || c.decimation != decimation)
                throw config_error("csv: curves must share decimation and length");
    }
    out << "iteration";
    for (const auto& l : labels) out << "," << l;
    out << "\n";
    char buf[40];
    for (std::size_t r = 0; r < rows; ++r) {
        out << (static_cast<long>(r) * decimation);
        for (const auto& c : curves) {
            std::snprintf(buf, sizeof buf, "%.9g", c.db[r]);
            out << "," << buf;
        }
        out << "\n";
    }
}

// Reads a file written by write_csv. Decimation is recovered from the
// iteration column spacing.
inline std::pair<std::vector<std::string>, std::vector<MsdCurve>> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw config_error("csv: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (fields.empty() || fields.front() != "iteration")
        throw config_error("csv: first column must be \"iteration\"");
    const std::vector<std::string> labels(fields.begin() + 1, fields.end());

    std::vector<MsdCurve> curves(labels.size());
    std::vector<long> iterations;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t col = 0, start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const std::string cell = line.substr(start, comma - start);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw config_error("csv: unparsable cell: " + cell);
            if (col == 0)
                iterations.push_back(static_cast<long>(v));
            else if (col - 1 < curves.size())
                curves[col - 1].db.push_back(v);
            else
                throw config_error("csv: row wider than header");
            ++col;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (col != labels.size() + 1) throw config_error("csv: row narrower than header");
    }
    const int decimation =
        iterations.size() >= 2 ? static_cast<int>(iterations[1] - iterations[0]) : 1;
    for (auto& c : curves) c.decimation = decimation;
    return {labels, curves};
}

// Per-segment convergence figures for one variant.
struct SegmentSummary {
    long start_iteration = 0;
    double steady_state_db = 0.0; // mean of the last 10% of recorded points
    // Segment-relative iterations to each configured threshold; nullopt when
    // the threshold is never durably reached inside the segment.
    std::vector<std::optional<long>> to_threshold;
};

struct VariantSummary {
    std::string label;
    std::vector<SegmentSummary> segments;
};

struct RunSummary {
    std::vector<double> thresholds;
    std::vector<VariantSummary> variants;
};

// Steady state and threshold crossings per segment. Segments are cut at the
// recorded-index boundaries; nothing is averaged across a boundary.
inline RunSummary summarize(const std::vector<MsdCurve>& curves,
                            const std::vector<std::string>& labels,
                            const std::vector<long>& segment_starts,
                            const std::vector<double>& thresholds) {
    if (labels.size() != curves.size())
        throw config_error("summary: one label per curve required");
    if (curves.empty()) return {thresholds, {}};
    const std::size_t points = curves.front().db.size();
    const int dec = curves.front().decimation;
    for (const auto& c : curves)
        if (c.db.size() != points || c.decimation != dec)
            throw config_error("summary: curves must share decimation and length");

    std::vector<long> starts = segment_starts.empty() ? std::vector<long>{0} : segment_starts;

    RunSummary summary;
    summary.thresholds = thresholds;
    for (std::size_t vi = 0; vi < curves.size(); ++vi) {
        VariantSummary vs;
        vs.label = labels[vi];
        for (std::size_t si = 0; si < starts.size(); ++si) {
            const long lo = (starts[si] + dec - 1) / dec;
            const long hi = si + 1 < starts.size()
                                ? std::min<long>((starts[si + 1] + dec - 1) / dec,
                                                 static_cast<long>(points))
                                : static_cast<long>(points);
            SegmentSummary ss;
            ss.start_iteration = starts[si];
            if (lo >= hi) {
                ss.steady_state_db = std::nan("");
                ss.to_threshold.assign(thresholds.size(), std::nullopt);
                vs.segments.push_back(std::move(ss));
                continue;
            }
            const long len = hi - lo;
            const long tail = std::max<long>(1, len / 10);
            double acc = 0.0;
            for (long r = hi - tail; r < hi; ++r) acc += curves[vi].db[std::size_t(r)];
            ss.steady_state_db = acc / double(tail);

            MsdCurve sub;
            sub.decimation = dec;
            sub.db.assign(curves[vi].db.begin() + lo, curves[vi].db.begin() + hi);
            for (double t : thresholds) {
                const auto idx = iterations_to_threshold(sub, t);
                ss.to_threshold.push_back(idx ? std::optional<long>(*idx * dec) : std::nullopt);
            }
            vs.segments.push_back(std::move(ss));
        }
        summary.variants.push_back(std::move(vs));
    }
    return summary;
}

inline void print_summary(std::ostream& out, const RunSummary& summary) {
    std::vector<std::string> header = {"variant", "segment", "start", "steady[dB]"};
    for (double t : summary.thresholds) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "to %g dB[iter]", t);
        header.push_back(buf);
    }
    std::vector<std::vector<std::string>> table{header};
    for (const auto& vs : summary.variants) {
        for (std::size_t si = 0; si < vs.segments.size(); ++si) {
            const auto& ss = vs.segments[si];
            std::vector<std::string> row;
            row.push_back(vs.label);
            row.push_back(std::to_string(si + 1));
            row.push_back(std::to_string(ss.start_iteration));
            char buf[48];
            std::snprintf(buf, sizeof buf, "%.2f", ss.steady_state_db);
            row.push_back(buf);
            for (const auto& t : ss.to_threshold)
                row.push_back(t ? std::to_string(*t) : std::string("-"));
            table.push_back(std::move(row));
        }
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : table)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    for (const auto& row : table) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << std::left << std::setw(static_cast<int>(width[c]) + 2) << row[c];
        }
        out << "\n";
    }
}

// Full batch run: experiment, CSV, summary table, divergence report.
// Returns 0 on success, 1 when any (variant, trial) diverged, 2 when the
// output file cannot be written.
inline int run_command(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
    if (spec.output_path.empty()) {
        err << "error: no output path (set \"output\" in the config or pass --out)\n";
        return 2;
    }
    const ExperimentResult result = run_experiment(spec);

    std::vector<std::string> labels;
    for (const auto& v : spec.variants) labels.push_back(v.label);

    {
        std::ofstream f(spec.output_path, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << spec.output_path << "\n";
            return 2;
        }
        write_csv(f, labels, result.curves);
    }

    std::vector<long> starts;
    for (const auto& seg : spec.schedule.segments) starts.push_back(seg.start);
    print_summary(out, summarize(result.curves, labels, starts, spec.thresholds));
    out << "wrote " << spec.output_path << "\n";

    if (!result.failures.empty()) {
        err << "partial failure: " << result.failures.size() << " diverged trial(s)\n";
        for (const auto& f : result.failures)
            err << "  variant " << f.variant << " trial " << f.trial << " diverged at iteration "
                << f.iteration << " (mu=" << f.mu << "): " << f.message << "\n";
        return 1;
    }
    return 0;
}

} // namespace fxap
