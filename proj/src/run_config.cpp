// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "phasecal/experiments.hpp"
#include "phasecal/version.hpp"

namespace phasecal {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("config: " + what);
}

double parse_snr(const json& entry) {
    if (entry.is_number()) return entry.get<double>();
    if (entry.is_string()) {
        std::string s = entry.get<std::string>();
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (s == "inf" || s == "+inf" || s == "infinity")
            return std::numeric_limits<double>::infinity();
        fail("snr_list_db entry \"" + entry.get<std::string>() + "\" is not a number or \"inf\"");
    }
    fail("snr_list_db entries must be numbers or \"inf\"");
}

Interval parse_interval(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(key + " must be a [lo, hi] pair");
    return {v[0].get<double>(), v[1].get<double>()};
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "experiment",       "n_antennas",     "q_bits",
        "gain_range_db",    "phase_shifter_err_range_deg",
        "antenna_path_err_range_deg",         "phase_dependent",
        "snr_list_db",      "iterations",     "master_seed",
        "seed",             "output_dir",     "rev_iterations",
        "eirp_instances",   "sphere_samples", "refine"};
    return keys;
}

const std::set<std::string>& known_refine_keys() {
    static const std::set<std::string> keys{"max_iterations", "gradient_tol", "step_tol",
                                            "damping_init"};
    return keys;
}

json snr_to_json(double snr_db) {
    if (snr_db == std::numeric_limits<double>::infinity()) return json("inf");
    return json(snr_db);
}

json interval_to_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::filesystem::path sidecar_path(std::filesystem::path p) {
    p.replace_extension(".meta.json");
    return p;
}

}  // namespace

RunConfig run_config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("top level must be an object");

    for (const auto& item : j.items())
        if (!known_keys().count(item.key())) fail("unknown key \"" + item.key() + "\"");
    if (j.count("master_seed") && j.count("seed"))
        fail("give either master_seed or seed, not both");

    RunConfig cfg;
    try {
        cfg.experiment = j.value("experiment", cfg.experiment);
        cfg.array.n_antennas = j.value("n_antennas", cfg.array.n_antennas);
        cfg.array.q_bits = j.value("q_bits", cfg.array.q_bits);
        if (j.count("gain_range_db"))
            cfg.errors.gain_range_db = parse_interval(j, "gain_range_db");
        if (j.count("phase_shifter_err_range_deg"))
            cfg.errors.phase_shifter_err_range_deg =
                parse_interval(j, "phase_shifter_err_range_deg");
        if (j.count("antenna_path_err_range_deg"))
            cfg.errors.antenna_path_err_range_deg =
                parse_interval(j, "antenna_path_err_range_deg");
        cfg.errors.phase_dependent = j.value("phase_dependent", cfg.errors.phase_dependent);
        if (j.count("snr_list_db")) {
            const json& list = j.at("snr_list_db");
            if (!list.is_array() || list.empty()) fail("snr_list_db must be a non-empty array");
            cfg.snr_list_db.clear();
            for (const json& entry : list) cfg.snr_list_db.push_back(parse_snr(entry));
        }
        cfg.iterations = j.value("iterations", cfg.iterations);
        cfg.master_seed = j.value("master_seed", j.value("seed", cfg.master_seed));
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
        cfg.rev_iterations = j.value("rev_iterations", cfg.rev_iterations);
        cfg.eirp_instances = j.value("eirp_instances", cfg.eirp_instances);
        cfg.sphere_samples = j.value("sphere_samples", cfg.sphere_samples);
        if (j.count("refine")) {
            const json& r = j.at("refine");
            if (!r.is_object()) fail("refine must be an object");
            for (const auto& item : r.items())
                if (!known_refine_keys().count(item.key()))
                    fail("unknown refine key \"" + item.key() + "\"");
            cfg.refine.max_iterations = r.value("max_iterations", cfg.refine.max_iterations);
            cfg.refine.gradient_tol = r.value("gradient_tol", cfg.refine.gradient_tol);
            cfg.refine.step_tol = r.value("step_tol", cfg.refine.step_tol);
            cfg.refine.damping_init = r.value("damping_init", cfg.refine.damping_init);
        }
    } catch (const json::type_error& e) {
        fail(std::string("bad value type: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return run_config_from_json_text(buf.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

std::string run_config_to_json_text(const RunConfig& config) {
    json j;
    j["experiment"] = config.experiment;
    j["n_antennas"] = config.array.n_antennas;
    j["q_bits"] = config.array.q_bits;
    j["gain_range_db"] = interval_to_json(config.errors.gain_range_db);
    j["phase_shifter_err_range_deg"] = interval_to_json(config.errors.phase_shifter_err_range_deg);
    j["antenna_path_err_range_deg"] = interval_to_json(config.errors.antenna_path_err_range_deg);
    j["phase_dependent"] = config.errors.phase_dependent;
    j["snr_list_db"] = json::array();
    for (double snr : config.snr_list_db) j["snr_list_db"].push_back(snr_to_json(snr));
    j["iterations"] = config.iterations;
    j["master_seed"] = config.master_seed;
    j["output_dir"] = config.output_dir;
    j["rev_iterations"] = config.rev_iterations;
    j["eirp_instances"] = config.eirp_instances;
    j["sphere_samples"] = config.sphere_samples;
    j["refine"] = {{"max_iterations", config.refine.max_iterations},
                   {"gradient_tol", config.refine.gradient_tol},
                   {"step_tol", config.refine.step_tol},
                   {"damping_init", config.refine.damping_init}};
    return j.dump(2) + "\n";
}

void write_eirp_percentiles_json(std::ostream& out, const std::vector<CoverageCase>& cases) {
    const CoverageCase* base = nullptr;
    for (const auto& c : cases)
        if (c.label == "uncalibrated") base = &c;

    json arr = json::array();
    for (const auto& c : cases) {
        json entry;
        entry["codebook"] = c.label;
        entry["snr_db"] = std::isnan(c.snr_db) ? json(nullptr) : snr_to_json(c.snr_db);
        entry["p50_db"] = c.report.percentiles_db.at(50);
        entry["p99_db"] = c.report.percentiles_db.at(99);
        if (base != nullptr && &c != base) {
            entry["p50_delta_db"] = c.report.percentiles_db.at(50) -
                                    base->report.percentiles_db.at(50);
            entry["p99_delta_db"] = c.report.percentiles_db.at(99) -
                                    base->report.percentiles_db.at(99);
        }
        arr.push_back(entry);
    }
    out << arr.dump(2) << "\n";
}

std::vector<std::string> run_experiment_to_files(const RunConfig& config, Exec exec) {
    config.validate();
    namespace fs = std::filesystem;
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);

    const std::string config_echo = run_config_to_json_text(config);
    auto emit_sidecar = [&](const fs::path& output) {
        json meta;
        meta["generator"] = kVersionString;
        meta["experiment"] = config.experiment;
        meta["output"] = output.filename().string();
        meta["config"] = json::parse(config_echo);
        const fs::path side = sidecar_path(output);
        write_text_file(side, meta.dump(2) + "\n");
        return side.string();
    };

    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& body) {
        const fs::path path = dir / name;
        write_text_file(path, body);
        written.push_back(path.string());
        written.push_back(emit_sidecar(path));
    };

    if (config.experiment == "calibrate-sweep") {
        std::ostringstream body;
        write_sweep_csv(body, run_calibrate_sweep(config, exec));
        emit("calibrate_sweep.csv", body.str());
    } else if (config.experiment == "rev-compare") {
        std::ostringstream body;
        write_rev_compare_csv(body, run_rev_compare(config, exec));
        emit("rev_compare.csv", body.str());
    } else if (config.experiment == "eirp-cdf") {
        const std::vector<CoverageCase> cases = run_eirp_cdf(config, exec);
        for (const auto& c : cases) {
            std::ostringstream body;
            write_eirp_cdf_csv(body, c.report);
            emit("eirp_cdf_" + c.label + ".csv", body.str());
        }
        std::ostringstream percentiles;
        write_eirp_percentiles_json(percentiles, cases);
        emit("eirp_percentiles.json", percentiles.str());
    } else {
        throw std::invalid_argument("unknown experiment \"" + config.experiment +
                                    "\" (expected calibrate-sweep, rev-compare or eirp-cdf)");
    }
    return written;
}

}  // namespace phasecal
