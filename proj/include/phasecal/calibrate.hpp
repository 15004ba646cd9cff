// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasecal/measurement.hpp"

namespace phasecal {

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// An element measured with (numerically) zero power; cosines are undefined.
struct DegenerateElementError : CalibrationError {
    using CalibrationError::CalibrationError;
};
// The two phase references of a 2x2 recovery are too close to collinear.
struct ReferenceDegeneracyError : CalibrationError {
    using CalibrationError::CalibrationError;
};
// A record set does not cover what an operation needs.
struct IncompletePlanError : CalibrationError {
    using CalibrationError::CalibrationError;
};

struct CalibrationEstimate {
    Grid b_hat;    // amplitude estimates, >= 0
    Grid phi_hat;  // phase estimates in (-pi, pi], relative gauge phi_hat[0][0] == 0
    std::array<int, 3> refs{-1, -1, -1};  // chosen reference settings r1, r2, r3
    double lookahead_cos = 0.0;  // cosine that resolved the r1 sign; small |value| = fragile
};

// Anything that can produce received powers on demand. run_calibration asks
// for exactly the entries of build_plan, in plan order.
class PowerSource {
  public:
    virtual ~PowerSource() = default;
    virtual double individual(int i, int k) = 0;
    virtual double pair(int i, int k, int m, int n) = 0;
};

// Simulated measurement chain; derives one fresh noise substream per
// measurement ordinal and logs every record it serves.
class SimulatedSource final : public PowerSource {
  public:
    SimulatedSource(const GroundTruth& gt, const NoiseModel& noise) : gt_(gt), noise_(noise) {}

    double individual(int i, int k) override;
    double pair(int i, int k, int m, int n) override;

    const std::vector<MeasurementRecord>& records() const { return records_; }

  private:
    const GroundTruth& gt_;
    NoiseModel noise_;
    std::uint64_t ordinal_ = 0;
    std::vector<MeasurementRecord> records_;
};

// sqrt of each individual power, clamped at zero. Throws IncompletePlanError
// unless every (i, k) has an individual record.
Grid estimate_gains(const ArrayConfig& config, const std::vector<MeasurementRecord>& records);

// cos(phi_a - phi_b) from the pair power and the two individual powers,
// clamped to [-1, 1]. Throws DegenerateElementError when an individual power
// is zero.
double estimate_cos_diff(double m_pair, double m_a, double m_b);

struct SecondReference {
    int index = -1;          // r1, the setting of antenna 1 used as phase reference
    double phase = 0.0;      // signed phase assigned to it, close to +/- pi/2
    double lookahead_cos = 0.0;
};

// Picks the antenna-1 setting whose cosine against (0,0) is smallest in
// magnitude (ties -> lowest index) and fixes its sign by looking a quarter
// turn ahead: with cos_q = cos_to_ref[(r1 + 2^(Q-2)) mod 2^Q], a positive
// cos_q means the reference sits near -pi/2, otherwise near +pi/2.
SecondReference select_second_reference(const std::vector<double>& cos_to_ref);

// Smallest acceptable |sin(phi_ref1 - phi_ref2)| for a two-reference recovery.
inline constexpr double kMinReferenceSin = 0.05;
// |lookahead_cos| below this is reported as a fragile sign decision.
inline constexpr double kWeakLookahead = 0.3;

// Recovers a phase from its cosines against two known references:
// a = cos(phi - phi_ref1), b = cos(phi - phi_ref2). Solves the 2x2 system for
// (cos phi, sin phi) and returns atan2 of the pair without renormalising.
// Throws ReferenceDegeneracyError when the references are near collinear.
double resolve_phase_pair(double a, double b, double phi_ref1, double phi_ref2);

// Full power-only calibration. Requires n_antennas >= 3.
CalibrationEstimate run_calibration(const ArrayConfig& config, PowerSource& source);

struct CalibrationRun {
    CalibrationEstimate estimate;
    std::vector<MeasurementRecord> records;
};

CalibrationRun calibrate_simulated(const ArrayConfig& config, const GroundTruth& gt,
                                   const NoiseModel& noise);

// Columns: i,k,b_hat,phi_hat_rad.
void write_estimate_csv(std::ostream& out, const CalibrationEstimate& estimate);

}  // namespace phasecal
