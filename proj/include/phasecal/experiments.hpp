// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "phasecal/eirp.hpp"
#include "phasecal/exec.hpp"
#include "phasecal/metrics.hpp"
#include "phasecal/refine.hpp"
#include "phasecal/rev.hpp"

namespace phasecal {

struct RunConfig {
    std::string experiment;  // calibrate-sweep | rev-compare | eirp-cdf
    ArrayConfig array;
    ErrorSpec errors;
    std::vector<double> snr_list_db{10.0, 20.0, 30.0, 40.0};
    int iterations = 1000;  // Monte Carlo instances per SNR point
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";
    RefineSettings refine;
    int rev_iterations = 2;
    int eirp_instances = 200;
    int sphere_samples = 500;

    void validate() const;
};

struct SweepRow {
    double snr_db = 0.0;
    ErrorStats raw;  // closed-form estimate
    ErrorStats opt;  // after least-squares refinement
};

// Calibration accuracy versus SNR. Instance (snr s, iteration t) runs on
// streams keyed by (master_seed, s, t) and is evaluated independently of the
// execution order.
std::vector<SweepRow> run_calibrate_sweep(const RunConfig& config, Exec exec = Exec::Parallel);

struct RevCompareRow {
    double snr_db = 0.0;
    Aggregate phase_opt;  // refined estimates, per-antenna, radians
    Aggregate phase_rev;
    Aggregate gain_opt;   // dB
    Aggregate gain_rev;
    int measurements_ours = 0;
    int measurements_rev = 0;
};

// Head-to-head against the rotating-element baseline in the per-antenna error
// regime (the phase_dependent flag is forced off; a notice is printed if the
// config asked otherwise).
std::vector<RevCompareRow> run_rev_compare(const RunConfig& config, Exec exec = Exec::Parallel);

struct CoverageCase {
    std::string label;    // "uncalibrated" or "calibrated_<snr>db"
    double snr_db = 0.0;  // NaN for the uncalibrated case
    EirpReport report;
};

// Spherical-coverage EIRP CDFs: the ideal-design codebook as shipped versus
// codebooks re-designed from calibration estimates at each SNR in
// snr_list_db. eirp_instances error instances, sphere_samples directions each.
std::vector<CoverageCase> run_eirp_cdf(const RunConfig& config, Exec exec = Exec::Parallel);

// CSV emission. Writers take streams so tests can hold output bytes fixed.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_rev_compare_csv(std::ostream& out, const std::vector<RevCompareRow>& rows);
void write_eirp_cdf_csv(std::ostream& out, const EirpReport& report);
void write_eirp_percentiles_json(std::ostream& out, const std::vector<CoverageCase>& cases);

// Runs the experiment named in config.experiment and writes its outputs plus
// a .meta.json sidecar (config echo + version) per CSV into config.output_dir.
// Returns the paths written.
std::vector<std::string> run_experiment_to_files(const RunConfig& config,
                                                 Exec exec = Exec::Parallel);

// JSON config I/O. Accepts the flat key layout
// {experiment, n_antennas, q_bits, gain_range_db, phase_shifter_err_range_deg,
//  antenna_path_err_range_deg, phase_dependent, snr_list_db, iterations,
//  master_seed | seed, output_dir, ...}; snr entries may be numbers or "inf".
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json_text(const std::string& text);
std::string run_config_to_json_text(const RunConfig& config);

// "inf" or a trimmed decimal, used in labels and CSV cells.
std::string format_snr(double snr_db);

}  // namespace phasecal
