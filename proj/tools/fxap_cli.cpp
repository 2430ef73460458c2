// Batch front end: run experiment configs, validate them, and summarize CSV
// curves produced by earlier runs.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fxap/config.hpp"
#include "fxap/report.hpp"

namespace {

int do_run(const std::string& config_path, const std::string& out_override,
           long trials_override, long long seed_override, long decimation_override) {
    fxap::ExperimentSpec spec = fxap::load_spec(config_path);
    if (!out_override.empty()) spec.output_path = out_override;
    if (trials_override > 0) spec.trials = static_cast<int>(trials_override);
    if (seed_override >= 0) spec.base_seed = static_cast<std::uint64_t>(seed_override);
    if (decimation_override > 0) spec.decimation = static_cast<int>(decimation_override);
    fxap::validate_spec(spec);
    return fxap::run_command(spec, std::cout, std::cerr);
}

int do_validate(const std::string& config_path) {
    const fxap::ExperimentSpec spec = fxap::load_spec(config_path);
    std::cout << "ok: " << config_path << "\n"
              << "  filter_length " << spec.filter_length << ", secondary_length "
              << spec.secondary_length << ", plant " << fxap::to_string(spec.plant.kind)
              << "\n"
              << "  " << spec.schedule.segments.size() << " segment(s), "
              << spec.schedule.total_iterations << " iterations, " << spec.trials
              << " trial(s), decimation " << spec.decimation << "\n"
              << "  variants:";
    for (const auto& v : spec.variants) std::cout << " " << v.label;
    std::cout << "\n";
    return 0;
}

int do_summary(const std::string& csv_path, std::vector<double> thresholds,
               const std::string& segments_arg) {
    std::ifstream f(csv_path, std::ios::binary);
    if (!f) throw fxap::config_error("cannot open " + csv_path);
    const auto [labels, curves] = fxap::read_csv(f);

    std::vector<long> starts{0};
    if (!segments_arg.empty()) {
        starts.clear();
        std::size_t pos = 0;
        while (pos <= segments_arg.size()) {
            const auto comma = segments_arg.find(',', pos);
            const std::string tok = segments_arg.substr(pos, comma - pos);
            try {
                starts.push_back(std::stol(tok));
            } catch (const std::exception&) {
                throw fxap::config_error("--segments: expected comma-separated iterations");
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (thresholds.empty()) thresholds = {-10.0, -20.0, -30.0};
    fxap::print_summary(std::cout, fxap::summarize(curves, labels, starts, thresholds));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparsity-aware modified filtered-x affine projection ANC simulator"};
    app.require_subcommand(1);

    std::string config_path, out_override, csv_path, segments_arg;
    long trials_override = 0, decimation_override = 0;
    long long seed_override = -1;
    std::vector<double> thresholds;

    CLI::App* run = app.add_subcommand("run", "run an experiment config and write a CSV");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_override, "output CSV path (overrides the config)");
    run->add_option("--trials", trials_override, "trial count (overrides the config)");
    run->add_option("--seed", seed_override, "base seed (overrides the config)");
    run->add_option("--decimation", decimation_override,
                    "curve decimation (overrides the config)");

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
    validate->add_option("config", config_path, "config file")->required();

    CLI::App* summary = app.add_subcommand("summary", "summarize a CSV written by run");
    summary->add_option("csv", csv_path, "CSV file")->required();
    summary->add_option("--threshold", thresholds, "threshold(s) in dB (default -10 -20 -30)");
    summary->add_option("--segments", segments_arg,
                        "comma-separated segment start iterations (default one segment)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return do_run(config_path, out_override, trials_override, seed_override,
                          decimation_override);
        if (validate->parsed()) return do_validate(config_path);
        return do_summary(csv_path, thresholds, segments_arg);
    } catch (const fxap::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
