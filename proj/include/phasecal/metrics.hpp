// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "phasecal/calibrate.hpp"

namespace phasecal {

// Distance on the circle: min over integers l of |t - e + 2*pi*l|, in [0, pi].
double wrapped_phase_error(double true_phi, double est_phi);

// 20*log10(|b - b_hat| / b + 1); zero iff exact, always >= 0.
double gain_error_db(double true_b, double est_b);

struct Aggregate {
    double err_max = 0.0;  // mean over instances of the per-instance max
    double err_avg = 0.0;  // mean over instances and entries
};

// Reduces per-instance error tables. With exclude_reference the (0, 0) entry
// of each table is skipped (the phase gauge makes its error zero by fiat).
Aggregate aggregate(const std::vector<Grid>& per_instance_errors, bool exclude_reference);

struct ErrorStats {
    double err_max_rad = 0.0;
    double err_avg_rad = 0.0;
    double gain_err_max_db = 0.0;
    double gain_err_avg_db = 0.0;
};

// Wrapped phase error of the estimate against the truth in the estimate's own
// gauge (true phases taken relative to element (0, 0)).
Grid phase_error_grid(const GroundTruth& gt, const CalibrationEstimate& estimate);
Grid gain_error_grid(const GroundTruth& gt, const CalibrationEstimate& estimate);

}  // namespace phasecal
