// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "phasecal/experiments.hpp"

using namespace phasecal;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_sweep() {
    RunConfig cfg;
    cfg.experiment = "calibrate-sweep";
    cfg.snr_list_db = {20.0, 30.0};
    cfg.iterations = 6;
    cfg.master_seed = 11;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config json round-trips through text") {
    RunConfig cfg = tiny_sweep();
    cfg.errors.phase_dependent = false;
    cfg.snr_list_db = {10.0, std::numeric_limits<double>::infinity()};
    cfg.output_dir = "results";
    cfg.refine.max_iterations = 55;

    const RunConfig back = run_config_from_json_text(run_config_to_json_text(cfg));
    CHECK(back.experiment == cfg.experiment);
    CHECK(back.array.n_antennas == cfg.array.n_antennas);
    CHECK(back.errors.phase_dependent == false);
    CHECK(back.snr_list_db == cfg.snr_list_db);
    CHECK(back.iterations == cfg.iterations);
    CHECK(back.master_seed == cfg.master_seed);
    CHECK(back.output_dir == "results");
    CHECK(back.refine.max_iterations == 55);
}

TEST_CASE("config parsing diagnoses malformed input") {
    CHECK_THROWS_WITH_AS(run_config_from_json_text("{"), doctest::Contains("invalid JSON"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(run_config_from_json_text("[1,2]"), doctest::Contains("top level"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(run_config_from_json_text(R"({"n_antenas": 4})"),
                         doctest::Contains("unknown key"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(run_config_from_json_text(R"({"snr_list_db": []})"),
                         doctest::Contains("snr_list_db"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(run_config_from_json_text(R"({"snr_list_db": ["loud"]})"),
                         doctest::Contains("loud"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(run_config_from_json_text(R"({"gain_range_db": [1.0]})"),
                         doctest::Contains("lo, hi"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(run_config_from_json_text(R"({"master_seed": 1, "seed": 2})"),
                         doctest::Contains("not both"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(run_config_from_json_text(R"({"iterations": 0})"),
                         doctest::Contains("iterations"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(run_config_from_json_text(R"({"refine": {"steps": 3}})"),
                         doctest::Contains("refine key"), std::invalid_argument);
}

TEST_CASE("config accepts the seed alias and the inf spelling") {
    const RunConfig cfg = run_config_from_json_text(
        R"({"seed": 99, "snr_list_db": [20, "inf", "Infinity"], "n_antennas": 5})");
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.array.n_antennas == 5);
    REQUIRE(cfg.snr_list_db.size() == 3);
    CHECK(cfg.snr_list_db[0] == 20.0);
    CHECK(cfg.snr_list_db[1] == std::numeric_limits<double>::infinity());
    CHECK(cfg.snr_list_db[2] == std::numeric_limits<double>::infinity());
}

TEST_CASE("snr labels") {
    CHECK(format_snr(20.0) == "20");
    CHECK(format_snr(12.5) == "12.5");
    CHECK(format_snr(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("noiseless sweep reports errors at the float noise floor") {
    RunConfig cfg = tiny_sweep();
    cfg.snr_list_db = {std::numeric_limits<double>::infinity()};
    cfg.iterations = 10;
    const auto rows = run_calibrate_sweep(cfg, Exec::Serial);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].raw.err_max_rad <= 1e-7);
    CHECK(rows[0].raw.gain_err_max_db <= 1e-7);
    CHECK(rows[0].opt.err_max_rad <= 1e-7);
}

TEST_CASE("sweep rows are identical under serial and parallel execution") {
    const RunConfig cfg = tiny_sweep();
    const auto serial = run_calibrate_sweep(cfg, Exec::Serial);
    const auto parallel = run_calibrate_sweep(cfg, Exec::Parallel);
    std::ostringstream a, b;
    write_sweep_csv(a, serial);
    write_sweep_csv(b, parallel);
    CHECK(a.str() == b.str());
    CHECK(a.str().substr(0, a.str().find('\n')) ==
          "snr_db,err_max,err_avg,err_max_opt,err_avg_opt,gain_err_max_db,gain_err_avg_db,"
          "gain_err_max_opt_db,gain_err_avg_opt_db");
}

TEST_CASE("rev comparison forces the per-antenna regime and counts measurements") {
    RunConfig cfg = tiny_sweep();
    cfg.experiment = "rev-compare";
    cfg.snr_list_db = {30.0};
    cfg.iterations = 4;
    cfg.errors.phase_dependent = true;  // must be forced off with a notice
    const auto rows = run_rev_compare(cfg, Exec::Serial);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].measurements_ours == 93);
    CHECK(rows[0].measurements_rev == 64);
    CHECK(rows[0].phase_opt.err_max >= rows[0].phase_opt.err_avg);
    CHECK(rows[0].phase_rev.err_max >= rows[0].phase_rev.err_avg);

    const auto parallel = run_rev_compare(cfg, Exec::Parallel);
    std::ostringstream a, b;
    write_rev_compare_csv(a, rows);
    write_rev_compare_csv(b, parallel);
    CHECK(a.str() == b.str());
}

TEST_CASE("eirp cases carry labels for every configured snr") {
    RunConfig cfg = tiny_sweep();
    cfg.experiment = "eirp-cdf";
    cfg.snr_list_db = {20.0};
    cfg.eirp_instances = 3;
    cfg.sphere_samples = 32;
    const auto cases = run_eirp_cdf(cfg, Exec::Serial);
    REQUIRE(cases.size() == 2);
    CHECK(cases[0].label == "uncalibrated");
    CHECK(cases[1].label == "calibrated_20db");
    CHECK(cases[0].report.cdf_db.size() == 3 * 32);

    std::ostringstream json_out;
    write_eirp_percentiles_json(json_out, cases);
    const auto parsed = nlohmann::json::parse(json_out.str());
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0]["codebook"] == "uncalibrated");
    CHECK(parsed[0]["snr_db"].is_null());
    CHECK(parsed[1].contains("p50_delta_db"));
    CHECK(!parsed[0].contains("p50_delta_db"));
}

TEST_CASE("experiment driver writes artifacts with sidecars") {
    const fs::path dir = fs::temp_directory_path() / "phasecal_test_out";
    fs::remove_all(dir);

    RunConfig cfg = tiny_sweep();
    cfg.iterations = 3;
    cfg.snr_list_db = {25.0};
    cfg.output_dir = dir.string();

    const auto written = run_experiment_to_files(cfg, Exec::Serial);
    REQUIRE(written.size() == 2);
    CHECK(fs::exists(dir / "calibrate_sweep.csv"));
    CHECK(fs::exists(dir / "calibrate_sweep.meta.json"));

    const auto meta = nlohmann::json::parse(slurp(dir / "calibrate_sweep.meta.json"));
    CHECK(meta["experiment"] == "calibrate-sweep");
    CHECK(meta["output"] == "calibrate_sweep.csv");
    CHECK(meta["config"]["iterations"] == 3);
    CHECK(meta["generator"].is_string());

    SUBCASE("re-running reproduces the csv byte for byte") {
        const std::string first = slurp(dir / "calibrate_sweep.csv");
        run_experiment_to_files(cfg, Exec::Parallel);
        CHECK(slurp(dir / "calibrate_sweep.csv") == first);
    }

    SUBCASE("unknown experiment names are rejected") {
        cfg.experiment = "make-coffee";
        CHECK_THROWS_WITH_AS(run_experiment_to_files(cfg), doctest::Contains("make-coffee"),
                             std::invalid_argument);
    }

    fs::remove_all(dir);
}

TEST_CASE("eirp experiment driver emits one cdf per case plus percentiles") {
    const fs::path dir = fs::temp_directory_path() / "phasecal_test_eirp";
    fs::remove_all(dir);

    RunConfig cfg = tiny_sweep();
    cfg.experiment = "eirp-cdf";
    cfg.snr_list_db = {20.0};
    cfg.eirp_instances = 2;
    cfg.sphere_samples = 16;
    cfg.output_dir = dir.string();

    run_experiment_to_files(cfg, Exec::Serial);
    CHECK(fs::exists(dir / "eirp_cdf_uncalibrated.csv"));
    CHECK(fs::exists(dir / "eirp_cdf_calibrated_20db.csv"));
    CHECK(fs::exists(dir / "eirp_percentiles.json"));
    CHECK(fs::exists(dir / "eirp_percentiles.meta.json"));

    const std::string cdf = slurp(dir / "eirp_cdf_uncalibrated.csv");
    CHECK(cdf.substr(0, cdf.find('\n')) == "scaled_eirp_db,cum_prob");

    fs::remove_all(dir);
}
