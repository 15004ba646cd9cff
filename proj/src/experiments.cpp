// SPDX-License-Identifier: Apache-2.0
#include "phasecal/experiments.hpp"

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "phasecal/angles.hpp"
#include "phasecal/csv.hpp"
#include "phasecal/version.hpp"

namespace phasecal {

void RunConfig::validate() const {
    array.validate();
    errors.validate();
    refine.validate();
    if (snr_list_db.empty()) throw std::invalid_argument("snr_list_db must not be empty");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (rev_iterations < 1) throw std::invalid_argument("rev_iterations must be >= 1");
    if (eirp_instances < 1) throw std::invalid_argument("eirp_instances must be >= 1");
    if (sphere_samples < 1) throw std::invalid_argument("sphere_samples must be >= 1");
}

std::string format_snr(double snr_db) {
    if (snr_db == std::numeric_limits<double>::infinity()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", snr_db);
    return buf;
}

// ---------------------------------------------------------------- sweep ----

namespace {

struct SweepSample {
    Grid phase_raw, gain_raw, phase_opt, gain_opt;
};

SweepSample eval_sweep_instance(const RunConfig& config, double snr_db, std::uint64_t inst_seed) {
    const GroundTruth gt =
        generate_ground_truth(config.array, config.errors, substream_seed(inst_seed, 0));
    const NoiseModel noise{snr_db, substream_seed(inst_seed, 1), 1};
    const CalibrationRun run = calibrate_simulated(config.array, gt, noise);
    const RefineResult refined = refine(run.estimate, run.records, config.refine);

    SweepSample out;
    out.phase_raw = phase_error_grid(gt, run.estimate);
    out.gain_raw = gain_error_grid(gt, run.estimate);
    out.phase_opt = phase_error_grid(gt, refined.estimate);
    out.gain_opt = gain_error_grid(gt, refined.estimate);
    return out;
}

ErrorStats collect_stats(const std::vector<Grid>& phase, const std::vector<Grid>& gain) {
    const Aggregate p = aggregate(phase, true);
    const Aggregate g = aggregate(gain, false);
    return {p.err_max, p.err_avg, g.err_max, g.err_avg};
}

}  // namespace

std::vector<SweepRow> run_calibrate_sweep(const RunConfig& config, Exec exec) {
    config.validate();
    const int n_snr = static_cast<int>(config.snr_list_db.size());
    const int iters = config.iterations;
    const int total = n_snr * iters;

    std::vector<SweepSample> slots(total);
    auto eval = [&](int idx) {
        const int s = idx / iters;
        const int t = idx % iters;
        const std::uint64_t inst = substream_seed(config.master_seed, s, t);
        slots[idx] = eval_sweep_instance(config, config.snr_list_db[s], inst);
    };

    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int idx = 0; idx < total; ++idx) eval(idx);
    } else {
        for (int idx = 0; idx < total; ++idx) eval(idx);
    }

    std::vector<SweepRow> rows(n_snr);
    for (int s = 0; s < n_snr; ++s) {
        std::vector<Grid> pr(iters), gr(iters), po(iters), go(iters);
        for (int t = 0; t < iters; ++t) {
            SweepSample& sample = slots[s * iters + t];
            pr[t] = std::move(sample.phase_raw);
            gr[t] = std::move(sample.gain_raw);
            po[t] = std::move(sample.phase_opt);
            go[t] = std::move(sample.gain_opt);
        }
        rows[s] = {config.snr_list_db[s], collect_stats(pr, gr), collect_stats(po, go)};
    }
    return rows;
}

// ---------------------------------------------------------- rev compare ----

namespace {

struct RevCompareSample {
    Grid phase_opt, gain_opt, phase_rev, gain_rev;
    int meas_ours = 0, meas_rev = 0;
};

RevCompareSample eval_rev_instance(const RunConfig& config, const ErrorSpec& spec, double snr_db,
                                   std::uint64_t inst_seed) {
    const GroundTruth gt = generate_ground_truth(config.array, spec, substream_seed(inst_seed, 0));
    const int n = gt.n_antennas;
    const int np = gt.n_phases;
    const double step = config.array.phase_step();

    RevCompareSample out;
    out.phase_opt.assign(n, std::vector<double>(1, 0.0));
    out.gain_opt.assign(n, std::vector<double>(1, 0.0));
    out.phase_rev.assign(n, std::vector<double>(1, 0.0));
    out.gain_rev.assign(n, std::vector<double>(1, 0.0));

    const NoiseModel noise{snr_db, substream_seed(inst_seed, 1), 1};
    const CalibrationRun run = calibrate_simulated(config.array, gt, noise);
    const RefineResult refined = refine(run.estimate, run.records, config.refine);
    out.meas_ours = static_cast<int>(run.records.size());

    // Per-antenna regime: collapse the per-setting estimates into one path
    // phase (circular mean of phi_hat - k*step) and one gain per antenna.
    for (int i = 0; i < n; ++i) {
        std::complex<double> dir(0.0, 0.0);
        double b_mean = 0.0;
        for (int k = 0; k < np; ++k) {
            dir += std::polar(1.0, refined.estimate.phi_hat[i][k] - k * step);
            b_mean += refined.estimate.b_hat[i][k];
        }
        b_mean /= np;
        const double delta_hat = std::atan2(dir.imag(), dir.real());
        const double delta_true = gt.delta_ant[i] - gt.delta_ant[0];
        out.phase_opt[i][0] = i == 0 ? 0.0 : wrapped_phase_error(delta_true, delta_hat);
        out.gain_opt[i][0] = gain_error_db(gt.b[i][0], b_mean);
    }

    const NoiseModel rev_noise{snr_db, substream_seed(inst_seed, 3), 1};
    const RevResult rev = rev_calibrate(gt, rev_noise, {config.rev_iterations, false});
    const RevIteration& fin = rev.final_iteration();
    out.meas_rev = rev.measurement_count;
    for (int i = 0; i < n; ++i) {
        const double rel = wrap_pi(fin.rel_phase[i] - fin.rel_phase[0]);
        const double delta_true = gt.delta_ant[i] - gt.delta_ant[0];
        out.phase_rev[i][0] = i == 0 ? 0.0 : wrapped_phase_error(delta_true, rel);
        out.gain_rev[i][0] = gain_error_db(gt.b[i][0], fin.b_hat[i]);
    }
    return out;
}

}  // namespace

std::vector<RevCompareRow> run_rev_compare(const RunConfig& config, Exec exec) {
    config.validate();
    ErrorSpec spec = config.errors;
    if (spec.phase_dependent) {
        std::cerr << "note: rev-compare runs the per-antenna error regime; "
                     "phase_dependent forced off\n";
        spec.phase_dependent = false;
    }

    const int n_snr = static_cast<int>(config.snr_list_db.size());
    const int iters = config.iterations;
    const int total = n_snr * iters;

    std::vector<RevCompareSample> slots(total);
    auto eval = [&](int idx) {
        const int s = idx / iters;
        const int t = idx % iters;
        const std::uint64_t inst = substream_seed(config.master_seed, s, t);
        slots[idx] = eval_rev_instance(config, spec, config.snr_list_db[s], inst);
    };

    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int idx = 0; idx < total; ++idx) eval(idx);
    } else {
        for (int idx = 0; idx < total; ++idx) eval(idx);
    }

    std::vector<RevCompareRow> rows(n_snr);
    for (int s = 0; s < n_snr; ++s) {
        std::vector<Grid> po(iters), go(iters), pr(iters), gr(iters);
        for (int t = 0; t < iters; ++t) {
            RevCompareSample& sample = slots[s * iters + t];
            po[t] = std::move(sample.phase_opt);
            go[t] = std::move(sample.gain_opt);
            pr[t] = std::move(sample.phase_rev);
            gr[t] = std::move(sample.gain_rev);
        }
        RevCompareRow row;
        row.snr_db = config.snr_list_db[s];
        row.phase_opt = aggregate(po, true);
        row.gain_opt = aggregate(go, false);
        row.phase_rev = aggregate(pr, true);
        row.gain_rev = aggregate(gr, false);
        row.measurements_ours = slots[s * iters].meas_ours;
        row.measurements_rev = slots[s * iters].meas_rev;
        rows[s] = row;
    }
    return rows;
}

// ----------------------------------------------------------------- eirp ----

std::vector<CoverageCase> run_eirp_cdf(const RunConfig& config, Exec exec) {
    config.validate();

    const Codebook ideal_book = design_codebook(
        config.array,
        [&](const Codeword& cw, double theta) { return ideal_power(config.array, cw, theta); },
        std::vector<double>(kDefaultDirectionsDeg.begin(), kDefaultDirectionsDeg.end()));

    std::vector<CodebookSource> sources;
    std::vector<CoverageCase> cases;
    sources.push_back([ideal_book](const GroundTruth&, std::uint64_t) { return ideal_book; });
    cases.push_back({"uncalibrated", std::numeric_limits<double>::quiet_NaN(), {}});

    for (double snr : config.snr_list_db) {
        sources.push_back([&config, snr](const GroundTruth& gt, std::uint64_t noise_seed) {
            const CalibrationRun run =
                calibrate_simulated(config.array, gt, NoiseModel{snr, noise_seed, 1});
            const RefineResult refined = refine(run.estimate, run.records, config.refine);
            return design_codebook(
                config.array,
                [&refined](const Codeword& cw, double theta) {
                    return estimated_power(cw, refined.estimate, theta);
                },
                std::vector<double>(kDefaultDirectionsDeg.begin(), kDefaultDirectionsDeg.end()));
        });
        cases.push_back({"calibrated_" + format_snr(snr) + "db", snr, {}});
    }

    std::vector<std::uint64_t> seeds(config.eirp_instances);
    for (int t = 0; t < config.eirp_instances; ++t)
        seeds[t] = substream_seed(config.master_seed, t);

    std::vector<EirpReport> reports =
        eirp_cdf(config.array, config.errors, sources, config.sphere_samples, seeds, exec);
    for (std::size_t c = 0; c < cases.size(); ++c) cases[c].report = std::move(reports[c]);
    return cases;
}

// -------------------------------------------------------------- outputs ----

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    csv::write_row(out, {"snr_db", "err_max", "err_avg", "err_max_opt", "err_avg_opt",
                         "gain_err_max_db", "gain_err_avg_db", "gain_err_max_opt_db",
                         "gain_err_avg_opt_db"});
    for (const auto& r : rows)
        csv::write_row(out, {format_snr(r.snr_db), csv::num(r.raw.err_max_rad),
                             csv::num(r.raw.err_avg_rad), csv::num(r.opt.err_max_rad),
                             csv::num(r.opt.err_avg_rad), csv::num(r.raw.gain_err_max_db),
                             csv::num(r.raw.gain_err_avg_db), csv::num(r.opt.gain_err_max_db),
                             csv::num(r.opt.gain_err_avg_db)});
}

void write_rev_compare_csv(std::ostream& out, const std::vector<RevCompareRow>& rows) {
    csv::write_row(out, {"snr_db", "err_max_opt", "err_avg_opt", "err_max_rev", "err_avg_rev",
                         "gain_err_max_opt_db", "gain_err_avg_opt_db", "gain_err_max_rev_db",
                         "gain_err_avg_rev_db", "measurements_ours", "measurements_rev"});
    for (const auto& r : rows)
        csv::write_row(out, {format_snr(r.snr_db), csv::num(r.phase_opt.err_max),
                             csv::num(r.phase_opt.err_avg), csv::num(r.phase_rev.err_max),
                             csv::num(r.phase_rev.err_avg), csv::num(r.gain_opt.err_max),
                             csv::num(r.gain_opt.err_avg), csv::num(r.gain_rev.err_max),
                             csv::num(r.gain_rev.err_avg), csv::num(r.measurements_ours),
                             csv::num(r.measurements_rev)});
}

void write_eirp_cdf_csv(std::ostream& out, const EirpReport& report) {
    csv::write_row(out, {"scaled_eirp_db", "cum_prob"});
    for (std::size_t s = 0; s < report.cdf_db.size(); ++s)
        csv::write_row(out, {csv::num(report.cdf_db[s]), csv::num(report.cdf_prob[s])});
}

}  // namespace phasecal
