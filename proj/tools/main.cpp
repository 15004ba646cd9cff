// SPDX-License-Identifier: Apache-2.0
// Batch front end: one subcommand per experiment, config file plus overrides.
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phasecal/experiments.hpp"
#include "phasecal/version.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string output_dir;
    std::vector<double> snr_db;
    std::uint64_t seed = 0;
    int iterations = 0;
    int antennas = 0;
    int qbits = 0;
    int rev_iterations = 0;
    int eirp_instances = 0;
    int sphere_samples = 0;
    bool serial = false;
};

void add_common(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("-c,--config", ov.config_path, "JSON config file; defaults apply without it")
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--output-dir", ov.output_dir, "directory for result files");
    cmd->add_option("--snr", ov.snr_db, "SNR points in dB ('inf' for noiseless)");
    cmd->add_option("--seed", ov.seed, "master seed");
    cmd->add_option("-n,--iterations", ov.iterations, "Monte Carlo instances per SNR point");
    cmd->add_option("--antennas", ov.antennas, "number of antenna elements");
    cmd->add_option("--qbits", ov.qbits, "phase shifter resolution in bits");
    cmd->add_flag("--serial", ov.serial, "disable the parallel runner");
}

phasecal::RunConfig assemble(const Overrides& ov, const CLI::App& cmd,
                             const std::string& experiment) {
    auto given = [&cmd](const std::string& name) {
        const CLI::Option* opt = cmd.get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    phasecal::RunConfig cfg;
    if (!ov.config_path.empty()) cfg = phasecal::load_run_config(ov.config_path);
    cfg.experiment = experiment;
    if (given("--output-dir")) cfg.output_dir = ov.output_dir;
    if (given("--snr")) cfg.snr_list_db = ov.snr_db;
    if (given("--seed")) cfg.master_seed = ov.seed;
    if (given("--iterations")) cfg.iterations = ov.iterations;
    if (given("--antennas")) cfg.array.n_antennas = ov.antennas;
    if (given("--qbits")) cfg.array.q_bits = ov.qbits;
    if (given("--rev-iterations")) cfg.rev_iterations = ov.rev_iterations;
    if (given("--instances")) cfg.eirp_instances = ov.eirp_instances;
    if (given("--sphere-samples")) cfg.sphere_samples = ov.sphere_samples;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phased-array calibration experiments"};
    app.set_version_flag("--version", phasecal::kVersionString);
    app.require_subcommand(1);

    Overrides ov;
    CLI::App* sweep = app.add_subcommand(
        "calibrate-sweep", "calibration accuracy versus SNR, with and without refinement");
    add_common(sweep, ov);

    CLI::App* rev = app.add_subcommand(
        "rev-compare", "head-to-head against the rotating-element baseline");
    add_common(rev, ov);
    rev->add_option("--rev-iterations", ov.rev_iterations, "baseline sweep passes");

    CLI::App* eirp = app.add_subcommand(
        "eirp-cdf", "spherical-coverage EIRP CDFs for shipped and re-designed codebooks");
    add_common(eirp, ov);
    eirp->add_option("--instances", ov.eirp_instances, "error instances to pool");
    eirp->add_option("--sphere-samples", ov.sphere_samples, "directions per instance");

    CLI11_PARSE(app, argc, argv);

    CLI::App* cmd = app.get_subcommands().front();
    try {
        const phasecal::RunConfig cfg = assemble(ov, *cmd, cmd->get_name());
        const phasecal::Exec exec =
            ov.serial ? phasecal::Exec::Serial : phasecal::Exec::Parallel;
        for (const std::string& path : phasecal::run_experiment_to_files(cfg, exec))
            std::cout << path << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
