// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <vector>

#include "phasecal/measurement.hpp"

namespace phasecal {

struct RevOptions {
    int iterations = 2;
    // Replace the max/min grid rule with a continuous cosine fit (first DFT
    // bin of the power sweep). Kept for sensitivity studies; the grid rule is
    // the baseline of record.
    bool dft_fit = false;
};

// Per-iteration snapshot. rel_phase composes the corrections applied so far,
// so the last snapshot is the baseline's final answer.
struct RevIteration {
    std::vector<double> rel_amplitude;  // element amplitude / rest-of-array amplitude
    std::vector<double> rel_phase;      // radians in (-pi, pi], element vs rest composite
    std::vector<double> b_hat;          // absolute element amplitude estimate
    std::vector<char> degenerate;       // flat power sweep; estimates unusable
};

struct RevResult {
    std::vector<RevIteration> iterations;
    int measurement_count = 0;

    const RevIteration& final_iteration() const { return iterations.back(); }
};

// Rotating-element vector baseline: each antenna in turn sweeps its phase
// setting over the full grid while the others stay at setting 0 (all antennas
// transmitting). Pmax/Pmin of the sweep give the relative amplitude
// (sqrt(Pmax)-sqrt(Pmin))/(sqrt(Pmax)+sqrt(Pmin)); the nominal phase at Pmax,
// negated, gives the relative phase. Later iterations re-run the sweep with
// the accumulated corrections applied as continuous offsets.
RevResult rev_calibrate(const GroundTruth& gt, const NoiseModel& noise,
                        const RevOptions& options = {});

// Columns: antenna,rel_amplitude,rel_phase_rad,iteration.
void write_rev_csv(std::ostream& out, const RevResult& result);

}  // namespace phasecal
