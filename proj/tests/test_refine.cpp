// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "phasecal/angles.hpp"
#include "phasecal/metrics.hpp"
#include "phasecal/refine.hpp"
#include "test_helpers.hpp"

using namespace phasecal;

namespace {

const NoiseModel kNoiseless{};

CalibrationEstimate truth_as_estimate(const GroundTruth& gt) {
    CalibrationEstimate est;
    est.b_hat = gt.b;
    est.phi_hat.assign(gt.n_antennas, std::vector<double>(gt.n_phases, 0.0));
    for (int i = 0; i < gt.n_antennas; ++i)
        for (int k = 0; k < gt.n_phases; ++k)
            est.phi_hat[i][k] = wrap_pi(gt.phi[i][k] - gt.phi[0][0]);
    return est;
}

double mean_phase_error(const GroundTruth& gt, const CalibrationEstimate& est) {
    const Grid grid = phase_error_grid(gt, est);
    double acc = 0.0;
    int count = 0;
    for (int i = 0; i < gt.n_antennas; ++i)
        for (int k = 0; k < gt.n_phases; ++k) {
            if (i == 0 && k == 0) continue;
            acc += grid[i][k];
            ++count;
        }
    return acc / count;
}

}  // namespace

TEST_CASE("parameter layout pins one imaginary part") {
    const ParamLayout layout{4, 8};
    CHECK(layout.size() == 63);
    CHECK(layout.re_index(0, 0) == 0);
    CHECK(layout.im_index(0, 0) == -1);
    CHECK(layout.re_index(0, 1) == 1);
    CHECK(layout.im_index(0, 1) == 2);
    CHECK(layout.re_index(3, 7) == 61);
    CHECK(layout.im_index(3, 7) == 62);
}

TEST_CASE("pack and unpack round-trip an estimate") {
    ArrayConfig cfg;
    const GroundTruth gt = generate_ground_truth(cfg, ErrorSpec{}, 17);
    const CalibrationEstimate est = truth_as_estimate(gt);
    const ParamLayout layout{cfg.n_antennas, cfg.n_phases()};

    const CalibrationEstimate back = unpack_params(pack_params(est, layout), layout);
    for (int i = 0; i < cfg.n_antennas; ++i)
        for (int k = 0; k < cfg.n_phases(); ++k) {
            CHECK(back.b_hat[i][k] == doctest::Approx(est.b_hat[i][k]).epsilon(1e-12));
            CHECK(std::fabs(wrap_pi(back.phi_hat[i][k] - est.phi_hat[i][k])) < 1e-12);
        }
    CHECK(back.phi_hat[0][0] == 0.0);
}

TEST_CASE("packing re-anchors a rotated gauge") {
    ArrayConfig cfg;
    const GroundTruth gt = generate_ground_truth(cfg, ErrorSpec{}, 18);
    const CalibrationEstimate est = truth_as_estimate(gt);
    CalibrationEstimate rotated = est;
    for (auto& row : rotated.phi_hat)
        for (double& p : row) p = wrap_pi(p + 0.4);

    const ParamLayout layout{cfg.n_antennas, cfg.n_phases()};
    const Eigen::VectorXd a = pack_params(est, layout);
    const Eigen::VectorXd b = pack_params(rotated, layout);
    CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("unpacking flips an inverted gauge sign") {
    const ParamLayout layout{4, 8};
    Eigen::VectorXd x = Eigen::VectorXd::Random(layout.size());
    x[0] = -0.8;
    const CalibrationEstimate est = unpack_params(x, layout);
    CHECK(est.b_hat[0][0] == doctest::Approx(0.8));
    CHECK(est.phi_hat[0][0] == 0.0);
    const CalibrationEstimate neg = unpack_params(-x, layout);
    CHECK(est.b_hat == neg.b_hat);
    CHECK(est.phi_hat == neg.phi_hat);
}

TEST_CASE("objective evaluates residual squares directly") {
    const ParamLayout layout{1, 1};
    std::vector<MeasurementRecord> records;
    records.push_back({MeasurementKind::Individual, 0, 0, -1, -1, 1.0});
    Eigen::VectorXd x(1);
    x[0] = 1.1;
    CHECK(objective(x, layout, records) == doctest::Approx(0.0441).epsilon(1e-12));
}

TEST_CASE("objective vanishes at the truth and ignores the gauge") {
    ArrayConfig cfg;
    const GroundTruth gt = generate_ground_truth(cfg, ErrorSpec{}, 23);
    const CalibrationRun run = calibrate_simulated(cfg, gt, kNoiseless);
    const ParamLayout layout{cfg.n_antennas, cfg.n_phases()};

    const CalibrationEstimate est = truth_as_estimate(gt);
    const double f = objective(pack_params(est, layout), layout, run.records);
    CHECK(f < 1e-20);

    CalibrationEstimate rotated = est;
    for (auto& row : rotated.phi_hat)
        for (double& p : row) p = wrap_pi(p + 1.1);
    const double g = objective(pack_params(rotated, layout), layout, run.records);
    CHECK(std::fabs(f - g) < 1e-20);
}

TEST_CASE("analytic jacobian matches central differences") {
    ArrayConfig cfg;
    cfg.n_antennas = 3;
    const GroundTruth gt = generate_ground_truth(cfg, ErrorSpec{}, 31);
    const CalibrationRun run = calibrate_simulated(cfg, gt, NoiseModel{25.0, 31, 1});
    const ParamLayout layout{cfg.n_antennas, cfg.n_phases()};

    RngStream rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd x(layout.size());
        for (int d = 0; d < x.size(); ++d) x[d] = rng.uniform(-1.2, 1.2);
        const Eigen::MatrixXd J = jacobian(x, layout, run.records);
        const double h = 1e-6;
        for (int d = 0; d < x.size(); ++d) {
            Eigen::VectorXd hi = x, lo = x;
            hi[d] += h;
            lo[d] -= h;
            const Eigen::VectorXd dr =
                (residuals(hi, layout, run.records) - residuals(lo, layout, run.records)) /
                (2.0 * h);
            for (int j = 0; j < dr.size(); ++j) {
                const double scale = std::max(1.0, std::fabs(J(j, d)));
                CHECK(std::fabs(J(j, d) - dr[j]) <= 1e-5 * scale);
            }
        }
    }
}

TEST_CASE("noiseless start at the optimum stays put") {
    ArrayConfig cfg;
    const GroundTruth gt = generate_ground_truth(cfg, ErrorSpec{}, 40);
    const CalibrationRun run = calibrate_simulated(cfg, gt, kNoiseless);
    const RefineResult res = refine(run.estimate, run.records);
    CHECK(res.converged);
    CHECK(res.final_objective <= res.initial_objective);
    CHECK(res.final_objective < 1e-18);
    for (int i = 0; i < cfg.n_antennas; ++i)
        for (int k = 0; k < cfg.n_phases(); ++k) {
            CHECK(res.estimate.b_hat[i][k] ==
                  doctest::Approx(run.estimate.b_hat[i][k]).epsilon(1e-9));
            CHECK(std::fabs(wrap_pi(res.estimate.phi_hat[i][k] - run.estimate.phi_hat[i][k])) <
                  1e-9);
        }
}

TEST_CASE("accepted steps never raise the objective") {
    ArrayConfig cfg;
    for (int seed = 0; seed < 10; ++seed) {
        const GroundTruth gt = generate_ground_truth(cfg, ErrorSpec{}, 100 + seed);
        const CalibrationRun run = calibrate_simulated(cfg, gt, NoiseModel{20.0, 7000u + seed, 1});
        const RefineResult res = refine(run.estimate, run.records);
        CHECK(res.final_objective <= res.initial_objective);
        CHECK(res.estimate.phi_hat[0][0] == 0.0);
        CHECK(res.estimate.b_hat[0][0] >= 0.0);
        double last = res.trace.front().objective;
        for (std::size_t t = 1; t < res.trace.size(); ++t) {
            if (!res.trace[t].accepted) continue;
            CHECK(res.trace[t].objective < last);
            last = res.trace[t].objective;
        }
    }
}

TEST_CASE("refinement usually improves noisy phase estimates") {
    ArrayConfig cfg;
    int improved = 0;
    const int trials = 60;
    for (int seed = 0; seed < trials; ++seed) {
        const GroundTruth gt = generate_ground_truth(cfg, ErrorSpec{}, 9000 + seed);
        const CalibrationRun run = calibrate_simulated(cfg, gt, NoiseModel{20.0, 600u + seed, 1});
        const RefineResult res = refine(run.estimate, run.records);
        if (mean_phase_error(gt, res.estimate) <= mean_phase_error(gt, run.estimate)) ++improved;
    }
    CHECK(improved >= trials * 7 / 10);
}

TEST_CASE("a rotated initial gauge lands on the same refined estimate") {
    ArrayConfig cfg;
    const GroundTruth gt = generate_ground_truth(cfg, ErrorSpec{}, 52);
    const CalibrationRun run = calibrate_simulated(cfg, gt, NoiseModel{25.0, 52, 1});

    CalibrationEstimate rotated = run.estimate;
    for (auto& row : rotated.phi_hat)
        for (double& p : row) p = wrap_pi(p + 0.9);

    const RefineResult a = refine(run.estimate, run.records);
    const RefineResult b = refine(rotated, run.records);
    for (int i = 0; i < cfg.n_antennas; ++i)
        for (int k = 0; k < cfg.n_phases(); ++k) {
            CHECK(a.estimate.b_hat[i][k] == doctest::Approx(b.estimate.b_hat[i][k]).epsilon(1e-8));
            CHECK(std::fabs(wrap_pi(a.estimate.phi_hat[i][k] - b.estimate.phi_hat[i][k])) < 1e-6);
        }
}

TEST_CASE("trace csv layout") {
    std::vector<TracePoint> trace;
    trace.push_back({0, 2.5, 0.001, 0.0, true});
    trace.push_back({1, 1.25, 0.001, 0.5, true});
    std::ostringstream out;
    write_trace_csv(out, trace);
    CHECK(out.str() ==
          "iteration,objective,damping,step_norm\n"
          "0,2.5,0.001,0\n"
          "1,1.25,0.001,0.5\n");
}
