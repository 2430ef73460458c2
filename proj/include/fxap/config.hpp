#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fxap/errors.hpp"
#include "fxap/experiment.hpp"

namespace fxap {

namespace cfgdetail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::string& ctx,
                       const std::set<std::string>& allowed) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw config_error("config: unknown key \"" + item.key() + "\" in " + ctx);
}

inline const json& require_key(const json& obj, const std::string& ctx,
                               const std::string& key) {
    if (!obj.contains(key))
        throw config_error("config: missing required key \"" + key + "\" in " + ctx);
    return obj.at(key);
}

inline long get_integer(const json& v, const std::string& ctx, const std::string& key) {
    if (!v.is_number_integer())
        throw config_error("config: key \"" + key + "\" in " + ctx + ": expected integer");
    return v.get<long>();
}

inline std::uint64_t get_seed(const json& v, const std::string& ctx, const std::string& key) {
    if (!(v.is_number_integer() && v.get<long long>() >= 0))
        throw config_error("config: key \"" + key + "\" in " + ctx +
                           ": expected non-negative integer");
    return v.get<std::uint64_t>();
}

inline double get_number(const json& v, const std::string& ctx, const std::string& key) {
    if (!v.is_number())
        throw config_error("config: key \"" + key + "\" in " + ctx + ": expected number");
    return v.get<double>();
}

inline std::string get_string(const json& v, const std::string& ctx, const std::string& key) {
    if (!v.is_string())
        throw config_error("config: key \"" + key + "\" in " + ctx + ": expected string");
    return v.get<std::string>();
}

// A density is either a number in (0,1] or a rational string "a/b".
inline double get_density(const json& v, const std::string& ctx, const std::string& key) {
    double d = 0.0;
    if (v.is_number()) {
        d = v.get<double>();
    } else if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto slash = s.find('/');
        std::size_t used_n = 0, used_d = 0;
        long num = 0, den = 0;
        try {
            num = std::stol(s.substr(0, slash), &used_n);
            den = slash == std::string::npos ? 0 : std::stol(s.substr(slash + 1), &used_d);
        } catch (const std::exception&) {
            throw config_error("config: key \"" + key + "\" in " + ctx +
                               ": expected number or rational string \"a/b\"");
        }
        if (slash == std::string::npos || used_n != slash || used_d != s.size() - slash - 1 ||
            den <= 0)
            throw config_error("config: key \"" + key + "\" in " + ctx +
                               ": expected number or rational string \"a/b\"");
        d = double(num) / double(den);
    } else {
        throw config_error("config: key \"" + key + "\" in " + ctx +
                           ": expected number or rational string \"a/b\"");
    }
    if (!(d > 0.0) || d > 1.0)
        throw config_error("config: key \"" + key + "\" in " + ctx +
                           ": density must lie in (0, 1]");
    return d;
}

inline PathSpec parse_path(const json& obj, const std::string& ctx, long length) {
    if (!obj.is_object()) throw config_error("config: " + ctx + ": expected an object");
    check_keys(obj, ctx, {"kind", "density", "base_density", "seed", "mask_seed"});
    PathSpec spec;
    const std::string kind = get_string(require_key(obj, ctx, "kind"), ctx, "kind");
    if (kind == "sparse")
        spec.kind = SparsityKind::sparse;
    else if (kind == "partially-sparse")
        spec.kind = SparsityKind::partially_sparse;
    else if (kind == "non-sparse")
        spec.kind = SparsityKind::non_sparse;
    else
        throw config_error("config: key \"kind\" in " + ctx +
                           ": expected one of sparse | partially-sparse | non-sparse");

    if (obj.contains("density"))
        spec.density = get_density(obj.at("density"), ctx, "density");
    if (obj.contains("base_density"))
        spec.base_density = get_density(obj.at("base_density"), ctx, "base_density");
    if (obj.contains("seed")) spec.seed = get_seed(obj.at("seed"), ctx, "seed");
    if (obj.contains("mask_seed"))
        spec.mask_seed = get_seed(obj.at("mask_seed"), ctx, "mask_seed");

    if (spec.kind == SparsityKind::sparse && spec.density &&
        std::lround(*spec.density * double(length)) != 1)
        throw config_error("config: " + ctx +
                           ": invariant violated: sparse density must equal 1/length");
    if (spec.kind == SparsityKind::partially_sparse && !spec.density)
        throw config_error("config: " + ctx + ": partially-sparse requires \"density\"");
    if (spec.kind != SparsityKind::sparse && !obj.contains("seed"))
        throw config_error("config: " + ctx + ": missing required key \"seed\"");
    return spec;
}

inline NoiseModel parse_input(const json& obj) {
    const std::string ctx = "\"input\"";
    if (!obj.is_object()) throw config_error("config: " + ctx + ": expected an object");
    check_keys(obj, ctx, {"model", "sigma", "a"});
    const std::string model = get_string(require_key(obj, ctx, "model"), ctx, "model");
    if (model == "white-gaussian") {
        WhiteGaussian w;
        if (obj.contains("sigma")) w.sigma = get_number(obj.at("sigma"), ctx, "sigma");
        if (obj.contains("a"))
            throw config_error("config: unknown key \"a\" in " + ctx + " for white-gaussian");
        NoiseModel m = w;
        validate(m);
        return m;
    }
    if (model == "ar1") {
        Ar1 a;
        if (obj.contains("sigma")) a.sigma = get_number(obj.at("sigma"), ctx, "sigma");
        a.a = get_number(require_key(obj, ctx, "a"), ctx, "a");
        NoiseModel m = a;
        validate(m);
        return m;
    }
    throw config_error("config: key \"model\" in " + ctx +
                       ": expected one of white-gaussian | ar1");
}

inline MeasurementNoise parse_noise(const json& obj) {
    const std::string ctx = "\"noise\"";
    if (!obj.is_object()) throw config_error("config: " + ctx + ": expected an object");
    check_keys(obj, ctx, {"model", "sigma", "snr_db"});
    const std::string model = get_string(require_key(obj, ctx, "model"), ctx, "model");
    MeasurementNoise n;
    if (model == "none") {
        if (obj.size() != 1)
            throw config_error("config: " + ctx + ": model \"none\" takes no other keys");
        return n;
    }
    if (model != "white-gaussian")
        throw config_error("config: key \"model\" in " + ctx +
                           ": expected one of none | white-gaussian");
    const bool has_sigma = obj.contains("sigma");
    const bool has_snr = obj.contains("snr_db");
    if (has_sigma == has_snr)
        throw config_error("config: " + ctx +
                           ": white-gaussian needs exactly one of \"sigma\" or \"snr_db\"");
    if (has_sigma) {
        n.kind = MeasurementNoise::Kind::sigma;
        n.value = get_number(obj.at("sigma"), ctx, "sigma");
    } else {
        n.kind = MeasurementNoise::Kind::snr_db;
        n.value = get_number(obj.at("snr_db"), ctx, "snr_db");
    }
    return n;
}

inline AlgorithmConfig parse_variant_config(const json& obj, const std::string& ctx,
                                            double default_delta) {
    AlgorithmConfig cfg;
    const std::string alg = get_string(require_key(obj, ctx, "algorithm"), ctx, "algorithm");
    if (alg == "fxap")
        cfg.variant = Variant::fxap;
    else if (alg == "mfxap")
        cfg.variant = Variant::mfxap;
    else if (alg == "za-mfxap")
        cfg.variant = Variant::za_mfxap;
    else if (alg == "rza-mfxap")
        cfg.variant = Variant::rza_mfxap;
    else
        throw config_error("config: key \"algorithm\" in " + ctx +
                           ": expected one of fxap | mfxap | za-mfxap | rza-mfxap");
    cfg.order = static_cast<int>(get_integer(require_key(obj, ctx, "order"), ctx, "order"));
    cfg.delta = obj.contains("delta") ? get_number(obj.at("delta"), ctx, "delta") : default_delta;
    if (obj.contains("rho")) cfg.rho = get_number(obj.at("rho"), ctx, "rho");
    if (obj.contains("rho_prime"))
        cfg.rho_prime = get_number(obj.at("rho_prime"), ctx, "rho_prime");
    if (cfg.variant != Variant::za_mfxap && cfg.rho != 0.0)
        throw config_error("config: " + ctx + ": \"rho\" only applies to za-mfxap");
    if (cfg.variant != Variant::rza_mfxap && cfg.rho_prime != 0.0)
        throw config_error("config: " + ctx + ": \"rho_prime\" only applies to rza-mfxap");
    return cfg;
}

} // namespace cfgdetail

// Parses and fully validates an experiment config document (JSON). Unknown
// keys are rejected; violated invariants are reported with the invariant
// text.
inline ExperimentSpec parse_spec(const std::string& text) {
    using cfgdetail::check_keys;
    using cfgdetail::get_density;
    using cfgdetail::get_integer;
    using cfgdetail::get_number;
    using cfgdetail::get_seed;
    using cfgdetail::get_string;
    using cfgdetail::require_key;
    using nlohmann::json;

    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw config_error(
            "config: empty document; required keys: filter_length, plant, schedule, "
            "variants, trials, base_seed");

    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config: top level must be an object");

    check_keys(j, "the top level",
               {"filter_length", "secondary_length", "input", "plant", "schedule", "variants",
                "delta", "trials", "base_seed", "noise", "decimation", "output", "thresholds"});
    for (const char* key : {"filter_length", "plant", "schedule", "variants", "trials",
                            "base_seed"})
        require_key(j, "the top level", key);

    ExperimentSpec spec;
    spec.filter_length =
        static_cast<int>(get_integer(j.at("filter_length"), "the top level", "filter_length"));
    spec.secondary_length =
        j.contains("secondary_length")
            ? static_cast<int>(
                  get_integer(j.at("secondary_length"), "the top level", "secondary_length"))
            : spec.filter_length;
    if (j.contains("input")) spec.input = cfgdetail::parse_input(j.at("input"));
    spec.plant = cfgdetail::parse_path(j.at("plant"), "\"plant\"", spec.filter_length);

    const json& sched = j.at("schedule");
    if (!sched.is_object()) throw config_error("config: \"schedule\": expected an object");
    check_keys(sched, "\"schedule\"", {"total_iterations", "segments"});
    spec.schedule.total_iterations =
        get_integer(require_key(sched, "\"schedule\"", "total_iterations"), "\"schedule\"",
                    "total_iterations");
    const json& segs = require_key(sched, "\"schedule\"", "segments");
    if (!segs.is_array() || segs.empty())
        throw config_error("config: \"schedule.segments\": expected a non-empty list");
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string ctx = "\"schedule.segments[" + std::to_string(i) + "]\"";
        const json& so = segs.at(i);
        if (!so.is_object()) throw config_error("config: " + ctx + ": expected an object");
        check_keys(so, ctx, {"start", "secondary", "mu", "eps"});
        Segment seg;
        seg.start = get_integer(require_key(so, ctx, "start"), ctx, "start");
        seg.secondary = cfgdetail::parse_path(require_key(so, ctx, "secondary"),
                                              ctx + ".secondary", spec.secondary_length);
        seg.mu = get_number(require_key(so, ctx, "mu"), ctx, "mu");
        seg.eps = so.contains("eps") ? get_number(so.at("eps"), ctx, "eps") : 10.0;
        spec.schedule.segments.push_back(std::move(seg));
    }

    const double default_delta =
        j.contains("delta") ? get_number(j.at("delta"), "the top level", "delta") : 0.002;

    const json& vars = j.at("variants");
    if (!vars.is_array() || vars.empty())
        throw config_error("config: \"variants\": expected a non-empty list");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string ctx = "\"variants[" + std::to_string(i) + "]\"";
        const json& vo = vars.at(i);
        if (!vo.is_object()) throw config_error("config: " + ctx + ": expected an object");
        check_keys(vo, ctx, {"label", "algorithm", "order", "delta", "rho", "rho_prime"});
        VariantSpec v;
        v.label = get_string(require_key(vo, ctx, "label"), ctx, "label");
        v.config = cfgdetail::parse_variant_config(vo, ctx, default_delta);
        spec.variants.push_back(std::move(v));
    }

    spec.trials = static_cast<int>(get_integer(j.at("trials"), "the top level", "trials"));
    spec.base_seed = get_seed(j.at("base_seed"), "the top level", "base_seed");
    if (j.contains("noise")) spec.noise = cfgdetail::parse_noise(j.at("noise"));
    if (j.contains("decimation"))
        spec.decimation =
            static_cast<int>(get_integer(j.at("decimation"), "the top level", "decimation"));
    if (j.contains("output")) spec.output_path = get_string(j.at("output"), "the top level", "output");
    if (j.contains("thresholds")) {
        const json& th = j.at("thresholds");
        if (!th.is_array() || th.empty())
            throw config_error("config: \"thresholds\": expected a non-empty list of numbers");
        spec.thresholds.clear();
        for (const auto& t : th)
            spec.thresholds.push_back(get_number(t, "\"thresholds\"", "thresholds"));
    }

    validate_spec(spec);
    return spec;
}

inline ExperimentSpec load_spec(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_spec(ss.str());
}

} // namespace fxap
