// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "phasecal/calibrate.hpp"
#include "phasecal/exec.hpp"

namespace phasecal {

struct Codeword {
    std::vector<int> phase_indices;  // one setting per antenna
};
using Codebook = std::vector<Codeword>;

// Boresight beam directions the codebook is designed for, degrees.
inline constexpr std::array<double, 6> kDefaultDirectionsDeg = {90.0, 19.0, 40.0,
                                                                -19.0, -40.0, 0.0};

// Radiated power of a codeword toward boresight angle theta (radians,
// |theta| <= pi/2) for a half-wavelength-spaced line array.
double ideal_power(const ArrayConfig& config, const Codeword& cw, double theta);
double estimated_power(const Codeword& cw, const CalibrationEstimate& estimate, double theta);
double true_power(const Codeword& cw, const GroundTruth& gt, double theta);

using PowerFn = std::function<double(const Codeword&, double theta)>;

// One codeword per direction, found by exhaustive search over the settings of
// antennas 1..N-1 with antenna 0 pinned at setting 0 (a common phase shift
// does not move the beam). Ties resolve to the lexicographically smallest
// codeword. Throws std::invalid_argument when the search space is above 2^20.
Codebook design_codebook(const ArrayConfig& config, const PowerFn& power,
                         const std::vector<double>& directions_deg);

// Best radiated power over the codebook toward theta.
double coverage_power(const GroundTruth& gt, const Codebook& codebook, double theta);

// Boresight angles distributed as arcsin(uniform[-1, 1]): uniform over the
// sphere seen by a linear array.
std::vector<double> sphere_directions(int count, RngStream& draw);

// Largest possible radiated power under the error model: every element at the
// top of the gain range, combining coherently.
double max_possible_eirp(const ArrayConfig& config, const ErrorSpec& spec);

// 10*log10(power / scale); <= 0 dB when scale is max_possible_eirp.
double scaled_eirp_db(double power, double scale);

struct EirpReport {
    std::vector<double> directions_deg;  // pooled sample directions
    std::vector<double> power;           // best-codeword radiated power per sample
    std::vector<double> cdf_db;          // sorted scaled EIRP samples
    std::vector<double> cdf_prob;        // matching cumulative probabilities
    std::map<int, double> percentiles_db;  // CDF read at 50% and 99%
};

EirpReport make_eirp_report(std::vector<double> directions_deg, std::vector<double> power,
                            double scale);

// Builds one codebook per error instance; the calibrated codebook depends on
// the per-instance estimate, so codebooks enter as factories.
using CodebookSource = std::function<Codebook(const GroundTruth& gt, std::uint64_t noise_seed)>;

// Coverage CDFs over error instances. Every source is evaluated on the same
// per-instance direction samples, so the reports are directly comparable. One
// report per source, samples pooled across instances.
std::vector<EirpReport> eirp_cdf(const ArrayConfig& config, const ErrorSpec& spec,
                                 const std::vector<CodebookSource>& sources, int sphere_samples,
                                 const std::vector<std::uint64_t>& instance_seeds,
                                 Exec exec = Exec::Parallel);

}  // namespace phasecal
