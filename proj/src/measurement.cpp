// SPDX-License-Identifier: Apache-2.0
#include "phasecal/measurement.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "phasecal/angles.hpp"
#include "phasecal/csv.hpp"

namespace phasecal {

static void check_element(const GroundTruth& gt, int i, int k) {
    if (i < 0 || i >= gt.n_antennas || k < 0 || k >= gt.n_phases)
        throw std::out_of_range("element (" + std::to_string(i) + ", " + std::to_string(k) +
                                ") outside the array");
}

double noisy_power(double amplitude, const NoiseModel& noise, RngStream& draw) {
    if (noise.noiseless()) return amplitude * amplitude;
    if (noise.repeats < 1) throw std::invalid_argument("noise repeats must be >= 1");
    const double scale = std::sqrt(noise.noise_variance() / 2.0);
    double acc = 0.0;
    for (int r = 0; r < noise.repeats; ++r) {
        auto [wr, wi] = draw.gaussian_pair();
        const double re = amplitude + scale * wr;
        const double im = scale * wi;
        acc += re * re + im * im;
    }
    return acc / noise.repeats;
}

double simulate_individual(const GroundTruth& gt, int i, int k, const NoiseModel& noise,
                           RngStream& draw) {
    check_element(gt, i, k);
    return noisy_power(gt.b[i][k], noise, draw);
}

double simulate_pair(const GroundTruth& gt, int i, int k, int m, int n, const NoiseModel& noise,
                     RngStream& draw) {
    check_element(gt, i, k);
    check_element(gt, m, n);
    if (i == m)
        throw std::invalid_argument("pair measurement needs two distinct antennas, got antenna " +
                                    std::to_string(i) + " twice");
    const double ba = gt.b[i][k];
    const double bb = gt.b[m][n];
    const double c = std::cos(gt.phi[i][k] - gt.phi[m][n]);
    const double p = ba * ba + bb * bb + 2.0 * ba * bb * c;
    return noisy_power(std::sqrt(std::max(p, 0.0)), noise, draw);
}

MeasurementPlan build_plan(const ArrayConfig& config, int r1, int r2, int r3) {
    config.validate();
    const int n = config.n_antennas;
    const int np = config.n_phases();
    if (n < 3) throw std::invalid_argument("measurement plan needs n_antennas >= 3");
    for (int r : {r1, r2, r3})
        if (r < 0 || r >= np)
            throw std::invalid_argument("reference setting " + std::to_string(r) +
                                        " outside [0, " + std::to_string(np) + ")");

    MeasurementPlan plan;
    plan.entries.reserve(3 * n * np - 3);

    for (int i = 0; i < n; ++i)
        for (int k = 0; k < np; ++k)
            plan.entries.push_back({MeasurementKind::Individual, i, k, -1, -1});

    for (int k = 0; k < np; ++k)
        plan.entries.push_back({MeasurementKind::Pair, 1, k, 0, 0});

    for (int i = 2; i < n; ++i)
        for (int k = 0; k < np; ++k) {
            plan.entries.push_back({MeasurementKind::Pair, i, k, 0, 0});
            plan.entries.push_back({MeasurementKind::Pair, i, k, 1, r1});
        }

    for (int k = 1; k < np; ++k) {
        plan.entries.push_back({MeasurementKind::Pair, 0, k, 1, r1});
        plan.entries.push_back({MeasurementKind::Pair, 0, k, 2, r2});
    }

    for (int k = 0; k < np; ++k) {
        if (k == r1) continue;
        plan.entries.push_back({MeasurementKind::Pair, 1, k, 2, r3});
    }

    return plan;
}

std::vector<MeasurementRecord> run_plan(const GroundTruth& gt, const MeasurementPlan& plan,
                                        const NoiseModel& noise) {
    std::vector<MeasurementRecord> records(plan.entries.size());
    for (std::size_t j = 0; j < plan.entries.size(); ++j) {
        const PlanEntry& e = plan.entries[j];
        RngStream draw(substream_seed(noise.seed, j));
        MeasurementRecord rec{e.kind, e.i, e.k, e.m, e.n, 0.0};
        if (e.kind == MeasurementKind::Individual)
            rec.power = simulate_individual(gt, e.i, e.k, noise, draw);
        else
            rec.power = simulate_pair(gt, e.i, e.k, e.m, e.n, noise, draw);
        records[j] = rec;
    }
    return records;
}

void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records) {
    csv::write_row(out, {"kind", "i", "k", "m", "n", "power"});
    for (const auto& r : records) {
        const bool pair = r.kind == MeasurementKind::Pair;
        csv::write_row(out, {pair ? "pair" : "individual", csv::num(r.i), csv::num(r.k),
                             pair ? csv::num(r.m) : "", pair ? csv::num(r.n) : "",
                             csv::num(r.power)});
    }
}

}  // namespace phasecal
