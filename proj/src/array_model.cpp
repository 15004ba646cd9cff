// SPDX-License-Identifier: Apache-2.0
#include "phasecal/array_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "phasecal/angles.hpp"
#include "phasecal/rng.hpp"

namespace phasecal {

double ArrayConfig::phase_step() const { return kTwoPi / n_phases(); }

void ArrayConfig::validate() const {
    if (n_antennas < 2)
        throw std::invalid_argument("n_antennas must be >= 2, got " + std::to_string(n_antennas));
    if (q_bits < 3 || q_bits > 16)
        throw std::invalid_argument("q_bits must be in [3, 16], got " + std::to_string(q_bits));
}

static void check_interval(const Interval& iv, const char* name) {
    if (!(iv.lo <= iv.hi))
        throw std::invalid_argument(std::string(name) + ": interval lower bound exceeds upper");
}

void ErrorSpec::validate() const {
    check_interval(gain_range_db, "gain_range_db");
    check_interval(phase_shifter_err_range_deg, "phase_shifter_err_range_deg");
    check_interval(antenna_path_err_range_deg, "antenna_path_err_range_deg");
}

double nominal_phase(const ArrayConfig& config, int k) {
    if (k < 0 || k >= config.n_phases())
        throw std::out_of_range("phase index " + std::to_string(k) + " outside [0, " +
                                std::to_string(config.n_phases()) + ")");
    return k * config.phase_step();
}

double quantize_phase(double radians) {
    return std::ldexp(std::round(std::ldexp(radians, 40)), -40);
}

GroundTruth generate_ground_truth(const ArrayConfig& config, const ErrorSpec& spec,
                                  std::uint64_t seed) {
    config.validate();
    spec.validate();

    const int n = config.n_antennas;
    const int np = config.n_phases();
    const double step = config.phase_step();

    GroundTruth gt;
    gt.n_antennas = n;
    gt.n_phases = np;
    gt.b.assign(n, std::vector<double>(np, 0.0));
    gt.phi.assign(n, std::vector<double>(np, 0.0));
    gt.delta_ant.resize(n);

    RngStream draw(seed);

    for (int i = 0; i < n; ++i)
        gt.delta_ant[i] = deg2rad(draw.uniform(spec.antenna_path_err_range_deg.lo,
                                               spec.antenna_path_err_range_deg.hi));

    for (int i = 0; i < n; ++i) {
        double gain_db_antenna = 0.0;
        if (!spec.phase_dependent)
            gain_db_antenna = draw.uniform(spec.gain_range_db.lo, spec.gain_range_db.hi);
        for (int k = 0; k < np; ++k) {
            double gain_db = gain_db_antenna;
            double shifter_err = 0.0;
            if (spec.phase_dependent) {
                gain_db = draw.uniform(spec.gain_range_db.lo, spec.gain_range_db.hi);
                shifter_err = deg2rad(draw.uniform(spec.phase_shifter_err_range_deg.lo,
                                                   spec.phase_shifter_err_range_deg.hi));
            }
            gt.b[i][k] = std::pow(10.0, gain_db / 20.0);
            gt.phi[i][k] = quantize_phase(k * step + shifter_err + gt.delta_ant[i]);
        }
    }
    return gt;
}

}  // namespace phasecal
