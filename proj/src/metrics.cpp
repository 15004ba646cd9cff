// SPDX-License-Identifier: Apache-2.0
#include "phasecal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phasecal/angles.hpp"

namespace phasecal {

double wrapped_phase_error(double true_phi, double est_phi) {
    return std::abs(wrap_pi(true_phi - est_phi));
}

double gain_error_db(double true_b, double est_b) {
    if (!(true_b > 0.0)) throw std::invalid_argument("true gain must be positive");
    return 20.0 * std::log10(std::abs(true_b - est_b) / true_b + 1.0);
}

Aggregate aggregate(const std::vector<Grid>& per_instance_errors, bool exclude_reference) {
    Aggregate out;
    if (per_instance_errors.empty()) throw std::invalid_argument("no error tables to aggregate");
    double sum_max = 0.0, sum_all = 0.0;
    std::size_t count_all = 0;
    for (const Grid& grid : per_instance_errors) {
        double inst_max = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (std::size_t k = 0; k < grid[i].size(); ++k) {
                if (exclude_reference && i == 0 && k == 0) continue;
                inst_max = any ? std::max(inst_max, grid[i][k]) : grid[i][k];
                any = true;
                sum_all += grid[i][k];
                ++count_all;
            }
        if (!any) throw std::invalid_argument("empty error table");
        sum_max += inst_max;
    }
    out.err_max = sum_max / per_instance_errors.size();
    out.err_avg = sum_all / count_all;
    return out;
}

Grid phase_error_grid(const GroundTruth& gt, const CalibrationEstimate& estimate) {
    Grid err(gt.n_antennas, std::vector<double>(gt.n_phases, 0.0));
    const double gauge = gt.phi[0][0];
    for (int i = 0; i < gt.n_antennas; ++i)
        for (int k = 0; k < gt.n_phases; ++k)
            err[i][k] = wrapped_phase_error(gt.phi[i][k] - gauge, estimate.phi_hat[i][k]);
    return err;
}

Grid gain_error_grid(const GroundTruth& gt, const CalibrationEstimate& estimate) {
    Grid err(gt.n_antennas, std::vector<double>(gt.n_phases, 0.0));
    for (int i = 0; i < gt.n_antennas; ++i)
        for (int k = 0; k < gt.n_phases; ++k)
            err[i][k] = gain_error_db(gt.b[i][k], estimate.b_hat[i][k]);
    return err;
}

}  // namespace phasecal
