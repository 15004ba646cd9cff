// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace phasecal {

// [antenna][phase index] value table.
using Grid = std::vector<std::vector<double>>;

struct ArrayConfig {
    int n_antennas = 4;
    int q_bits = 3;  // phase shifter resolution; 2^q_bits settings per antenna

    int n_phases() const { return 1 << q_bits; }
    double phase_step() const;  // 2*pi / 2^q_bits, exact multiple of the full turn

    void validate() const;  // throws std::invalid_argument
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Per-element error model. Gains are uniform in dB, phase errors uniform in
// degrees. With phase_dependent = false the array has one gain and one path
// phase error per antenna and no per-setting shifter error.
struct ErrorSpec {
    Interval gain_range_db{-1.5, 1.5};
    Interval phase_shifter_err_range_deg{-10.0, 10.0};
    Interval antenna_path_err_range_deg{-180.0, 180.0};
    bool phase_dependent = true;

    void validate() const;
};

struct GroundTruth {
    int n_antennas = 0;
    int n_phases = 0;
    Grid b;                         // linear element amplitude per (i, k)
    Grid phi;                       // element phase per (i, k), radians, unwrapped
    std::vector<double> delta_ant;  // per-antenna path phase error, radians
};

// Nominal phase of setting k, k * phase_step. Throws std::out_of_range.
double nominal_phase(const ArrayConfig& config, int k);

// Snaps a phase to the 2^-40 rad generation grid. Generated truth phases live
// on this grid so that adding a grid-aligned global offset shifts every phase
// exactly in floating point; pairwise phase differences are then bit-stable
// under a gauge change.
double quantize_phase(double radians);

GroundTruth generate_ground_truth(const ArrayConfig& config, const ErrorSpec& spec,
                                  std::uint64_t seed);

}  // namespace phasecal
