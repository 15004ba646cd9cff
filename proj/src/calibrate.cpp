// SPDX-License-Identifier: Apache-2.0
#include "phasecal/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "phasecal/angles.hpp"
#include "phasecal/csv.hpp"

namespace phasecal {

double SimulatedSource::individual(int i, int k) {
    RngStream draw(substream_seed(noise_.seed, ordinal_++));
    const double p = simulate_individual(gt_, i, k, noise_, draw);
    records_.push_back({MeasurementKind::Individual, i, k, -1, -1, p});
    return p;
}

double SimulatedSource::pair(int i, int k, int m, int n) {
    RngStream draw(substream_seed(noise_.seed, ordinal_++));
    const double p = simulate_pair(gt_, i, k, m, n, noise_, draw);
    records_.push_back({MeasurementKind::Pair, i, k, m, n, p});
    return p;
}

Grid estimate_gains(const ArrayConfig& config, const std::vector<MeasurementRecord>& records) {
    const int n = config.n_antennas;
    const int np = config.n_phases();
    Grid gains(n, std::vector<double>(np, 0.0));
    std::vector<std::vector<char>> seen(n, std::vector<char>(np, 0));
    for (const auto& r : records) {
        if (r.kind != MeasurementKind::Individual) continue;
        if (r.i < 0 || r.i >= n || r.k < 0 || r.k >= np)
            throw IncompletePlanError("individual record outside the array");
        gains[r.i][r.k] = std::sqrt(std::max(r.power, 0.0));
        seen[r.i][r.k] = 1;
    }
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < np; ++k)
            if (!seen[i][k])
                throw IncompletePlanError("no individual measurement for element (" +
                                          std::to_string(i) + ", " + std::to_string(k) + ")");
    return gains;
}

double estimate_cos_diff(double m_pair, double m_a, double m_b) {
    if (!(m_a > 0.0) || !(m_b > 0.0))
        throw DegenerateElementError("individual power is zero; relative phase undefined");
    const double c = (m_pair - m_a - m_b) / (2.0 * std::sqrt(m_a * m_b));
    return std::clamp(c, -1.0, 1.0);
}

SecondReference select_second_reference(const std::vector<double>& cos_to_ref) {
    const int np = static_cast<int>(cos_to_ref.size());
    if (np < 4 || (np & (np - 1)) != 0)
        throw std::invalid_argument("cosine table must cover 2^Q settings, Q >= 2");

    int r1 = 0;
    for (int k = 1; k < np; ++k)
        if (std::abs(cos_to_ref[k]) < std::abs(cos_to_ref[r1])) r1 = k;

    // The chosen setting sits near +/- pi/2 of the reference element; a
    // quarter turn further along the grid lands near 0 or pi, and its cosine
    // tells the two apart.
    const double look = cos_to_ref[(r1 + np / 4) % np];
    const double mag = std::acos(std::clamp(cos_to_ref[r1], -1.0, 1.0));
    SecondReference ref;
    ref.index = r1;
    ref.lookahead_cos = look;
    ref.phase = look > 0.0 ? -mag : mag;
    return ref;
}

double resolve_phase_pair(double a, double b, double phi_ref1, double phi_ref2) {
    const double det = std::sin(phi_ref2 - phi_ref1);
    if (std::abs(det) < kMinReferenceSin)
        throw ReferenceDegeneracyError("phase references are near collinear; |sin| = " +
                                       std::to_string(std::abs(det)));
    const double u = (std::sin(phi_ref2) * a - std::sin(phi_ref1) * b) / det;
    const double v = (std::cos(phi_ref1) * b - std::cos(phi_ref2) * a) / det;
    return wrap_pi(std::atan2(v, u));
}

CalibrationEstimate run_calibration(const ArrayConfig& config, PowerSource& source) {
    config.validate();
    const int n = config.n_antennas;
    const int np = config.n_phases();
    if (n < 3)
        throw std::invalid_argument(
            "calibration needs n_antennas >= 3 (two antennas leave a sign ambiguity)");

    Grid m_ind(n, std::vector<double>(np, 0.0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < np; ++k) m_ind[i][k] = source.individual(i, k);

    CalibrationEstimate est;
    est.b_hat.assign(n, std::vector<double>(np, 0.0));
    est.phi_hat.assign(n, std::vector<double>(np, 0.0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < np; ++k) est.b_hat[i][k] = std::sqrt(std::max(m_ind[i][k], 0.0));

    // Element (0, 0) is the phase gauge: everything is relative to it.
    est.phi_hat[0][0] = 0.0;

    std::vector<double> cos1(np);
    for (int k = 0; k < np; ++k)
        cos1[k] = estimate_cos_diff(source.pair(1, k, 0, 0), m_ind[1][k], m_ind[0][0]);

    const SecondReference ref = select_second_reference(cos1);
    const int r1 = ref.index;
    est.lookahead_cos = ref.lookahead_cos;
    est.phi_hat[1][r1] = ref.phase;

    for (int i = 2; i < n; ++i)
        for (int k = 0; k < np; ++k) {
            const double a = estimate_cos_diff(source.pair(i, k, 0, 0), m_ind[i][k], m_ind[0][0]);
            const double b =
                estimate_cos_diff(source.pair(i, k, 1, r1), m_ind[i][k], m_ind[1][r1]);
            est.phi_hat[i][k] = resolve_phase_pair(a, b, 0.0, ref.phase);
        }

    // Antenna 2 now has estimates everywhere; pick its settings closest to a
    // quarter turn from each reference in use. No further measurements needed.
    int r2 = 0;
    for (int k = 1; k < np; ++k)
        if (std::abs(std::cos(est.phi_hat[2][k] - ref.phase)) <
            std::abs(std::cos(est.phi_hat[2][r2] - ref.phase)))
            r2 = k;

    for (int k = 1; k < np; ++k) {
        const double a = estimate_cos_diff(source.pair(0, k, 1, r1), m_ind[0][k], m_ind[1][r1]);
        const double b = estimate_cos_diff(source.pair(0, k, 2, r2), m_ind[0][k], m_ind[2][r2]);
        est.phi_hat[0][k] = resolve_phase_pair(a, b, ref.phase, est.phi_hat[2][r2]);
    }

    int r3 = 0;
    for (int k = 1; k < np; ++k)
        if (std::abs(std::cos(est.phi_hat[2][k])) < std::abs(std::cos(est.phi_hat[2][r3]))) r3 = k;

    for (int k = 0; k < np; ++k) {
        if (k == r1) continue;
        const double b = estimate_cos_diff(source.pair(1, k, 2, r3), m_ind[1][k], m_ind[2][r3]);
        est.phi_hat[1][k] = resolve_phase_pair(cos1[k], b, 0.0, est.phi_hat[2][r3]);
    }

    est.refs = {r1, r2, r3};
    return est;
}

CalibrationRun calibrate_simulated(const ArrayConfig& config, const GroundTruth& gt,
                                   const NoiseModel& noise) {
    SimulatedSource source(gt, noise);
    CalibrationRun run;
    run.estimate = run_calibration(config, source);
    run.records = source.records();
    return run;
}

void write_estimate_csv(std::ostream& out, const CalibrationEstimate& estimate) {
    csv::write_row(out, {"i", "k", "b_hat", "phi_hat_rad"});
    for (std::size_t i = 0; i < estimate.b_hat.size(); ++i)
        for (std::size_t k = 0; k < estimate.b_hat[i].size(); ++k)
            csv::write_row(out, {csv::num(static_cast<int>(i)), csv::num(static_cast<int>(k)),
                                 csv::num(estimate.b_hat[i][k]), csv::num(estimate.phi_hat[i][k])});
}

}  // namespace phasecal
