// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "phasecal/array_model.hpp"
#include "phasecal/rng.hpp"

namespace phasecal {

struct NoiseModel {
    double snr_db = std::numeric_limits<double>::infinity();  // +inf = noiseless
    std::uint64_t seed = 0;
    int repeats = 1;  // powers averaged over this many draws per entry

    bool noiseless() const { return snr_db == std::numeric_limits<double>::infinity(); }
    double noise_variance() const { return noiseless() ? 0.0 : std::pow(10.0, -snr_db / 10.0); }
};

enum class MeasurementKind { Individual, Pair };

struct MeasurementRecord {
    MeasurementKind kind = MeasurementKind::Individual;
    int i = 0, k = 0;    // element switched on
    int m = -1, n = -1;  // second element (Pair only)
    double power = 0.0;
};

struct PlanEntry {
    MeasurementKind kind = MeasurementKind::Individual;
    int i = 0, k = 0;
    int m = -1, n = -1;
};

struct MeasurementPlan {
    std::vector<PlanEntry> entries;
};

// Received power for a field of the given amplitude with complex AWGN of total
// variance noise_variance(). The noise is drawn in the field's own frame:
// (|E| + wr)^2 + wi^2. By circular symmetry this has exactly the distribution
// of |E + w|^2, and it keeps the power independent of the absolute field
// phase, so a global phase offset on the truth cannot perturb measurements
// even at the bit level.
double noisy_power(double amplitude, const NoiseModel& noise, RngStream& draw);

// Single element (i, k) on: noiseless power is b_ik^2.
double simulate_individual(const GroundTruth& gt, int i, int k, const NoiseModel& noise,
                           RngStream& draw);

// Elements (i, k) and (m, n) on: noiseless power is
// b_ik^2 + b_mn^2 + 2 b_ik b_mn cos(phi_ik - phi_mn). Throws
// std::invalid_argument when both entries name the same antenna.
double simulate_pair(const GroundTruth& gt, int i, int k, int m, int n, const NoiseModel& noise,
                     RngStream& draw);

// Full measurement schedule for one calibration run given the three chosen
// reference settings. 3 * N * 2^Q - 3 entries:
//   stage 1: every (i, k) alone;
//   stage 2: (1, k) vs (0, 0) for all k;
//   stage 3: (i, k) vs (0, 0) and vs (1, r1) for i >= 2, all k;
//   stage 4: (0, k) vs (1, r1) and vs (2, r2) for k >= 1;
//   stage 5: (1, k) vs (2, r3) for k != r1.
// Stages 1-2 do not depend on the references; N >= 3 is required.
MeasurementPlan build_plan(const ArrayConfig& config, int r1, int r2, int r3);

// Executes a plan. Entry j draws its noise from substream j of noise.seed, so
// entries may be produced in any order or in parallel without changing values.
std::vector<MeasurementRecord> run_plan(const GroundTruth& gt, const MeasurementPlan& plan,
                                        const NoiseModel& noise);

// Columns: kind,i,k,m,n,power (m and n empty for individual entries).
void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records);

}  // namespace phasecal
