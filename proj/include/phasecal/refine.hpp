// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "phasecal/calibrate.hpp"

namespace phasecal {

struct RefineSettings {
    int max_iterations = 200;
    double gradient_tol = 1e-10;  // on the infinity norm of J^T r
    double step_tol = 1e-12;      // on the proposed step norm
    double damping_init = 1e-3;   // x10 on rejected steps, /3 on accepted ones

    void validate() const;
};

// Optimization variables: real and imaginary part of every element response
// b_ik * exp(j phi_ik). The imaginary part of element (0, 0) is pinned at zero
// to fix the global phase, leaving 2 * N * 2^Q - 1 free parameters.
struct ParamLayout {
    int n_antennas = 0;
    int n_phases = 0;

    int size() const { return 2 * n_antennas * n_phases - 1; }
    int re_index(int i, int k) const {
        int f = i * n_phases + k;
        return f == 0 ? 0 : 2 * f - 1;
    }
    // -1 marks the pinned imaginary part of (0, 0).
    int im_index(int i, int k) const {
        int f = i * n_phases + k;
        return f == 0 ? -1 : 2 * f;
    }
};

Eigen::VectorXd pack_params(const CalibrationEstimate& estimate, const ParamLayout& layout);
CalibrationEstimate unpack_params(const Eigen::VectorXd& params, const ParamLayout& layout);

// One residual per record: modelled power minus measured power. The noise
// term is not observable and carries no parameters, so it is simply absent.
Eigen::VectorXd residuals(const Eigen::VectorXd& params, const ParamLayout& layout,
                          const std::vector<MeasurementRecord>& records);
Eigen::MatrixXd jacobian(const Eigen::VectorXd& params, const ParamLayout& layout,
                         const std::vector<MeasurementRecord>& records);

// Sum of squared residuals.
double objective(const Eigen::VectorXd& params, const ParamLayout& layout,
                 const std::vector<MeasurementRecord>& records);

struct TracePoint {
    int iteration = 0;
    double objective = 0.0;
    double damping = 0.0;
    double step_norm = 0.0;
    bool accepted = false;
};

struct RefineResult {
    CalibrationEstimate estimate;
    bool converged = false;
    int iterations = 0;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    std::vector<TracePoint> trace;
};

// Levenberg-Marquardt refinement seeded at the closed-form estimate. Objective
// never increases across accepted steps; the output keeps the
// phi_hat[0][0] == 0 gauge. An initial estimate in a different gauge is
// rotated into it first.
RefineResult refine(const CalibrationEstimate& initial,
                    const std::vector<MeasurementRecord>& records,
                    const RefineSettings& settings = {});

// Columns: iteration,objective,damping,step_norm.
void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace);

}  // namespace phasecal
