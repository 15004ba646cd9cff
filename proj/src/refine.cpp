// SPDX-License-Identifier: Apache-2.0
#include "phasecal/refine.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "phasecal/angles.hpp"
#include "phasecal/csv.hpp"

namespace phasecal {

void RefineSettings::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (!(gradient_tol > 0.0) || !(step_tol > 0.0) || !(damping_init > 0.0))
        throw std::invalid_argument("refine tolerances and damping must be positive");
}

Eigen::VectorXd pack_params(const CalibrationEstimate& estimate, const ParamLayout& layout) {
    Eigen::VectorXd x(layout.size());
    // Rotate into the phi_hat[0][0] == 0 gauge first so the pinned imaginary
    // part really is zero.
    const double gauge = estimate.phi_hat[0][0];
    for (int i = 0; i < layout.n_antennas; ++i)
        for (int k = 0; k < layout.n_phases; ++k) {
            const double b = estimate.b_hat[i][k];
            const double p = wrap_pi(estimate.phi_hat[i][k] - gauge);
            x[layout.re_index(i, k)] = b * std::cos(p);
            const int im = layout.im_index(i, k);
            if (im >= 0) x[im] = b * std::sin(p);
        }
    return x;
}

CalibrationEstimate unpack_params(const Eigen::VectorXd& params, const ParamLayout& layout) {
    Eigen::VectorXd x = params;
    // The remaining gauge freedom is the sign of the pinned element; keep its
    // real part non-negative by rotating everything half a turn if needed.
    if (x[0] < 0.0) x = -x;

    CalibrationEstimate est;
    est.b_hat.assign(layout.n_antennas, std::vector<double>(layout.n_phases, 0.0));
    est.phi_hat.assign(layout.n_antennas, std::vector<double>(layout.n_phases, 0.0));
    for (int i = 0; i < layout.n_antennas; ++i)
        for (int k = 0; k < layout.n_phases; ++k) {
            const double re = x[layout.re_index(i, k)];
            const int imi = layout.im_index(i, k);
            const double im = imi >= 0 ? x[imi] : 0.0;
            est.b_hat[i][k] = std::hypot(re, im);
            est.phi_hat[i][k] = wrap_pi(std::atan2(im, re));
        }
    est.phi_hat[0][0] = 0.0;
    return est;
}

Eigen::VectorXd residuals(const Eigen::VectorXd& params, const ParamLayout& layout,
                          const std::vector<MeasurementRecord>& records) {
    Eigen::VectorXd r(records.size());
    for (std::size_t j = 0; j < records.size(); ++j) {
        const MeasurementRecord& rec = records[j];
        double re = params[layout.re_index(rec.i, rec.k)];
        const int im1 = layout.im_index(rec.i, rec.k);
        double im = im1 >= 0 ? params[im1] : 0.0;
        if (rec.kind == MeasurementKind::Pair) {
            re += params[layout.re_index(rec.m, rec.n)];
            const int im2 = layout.im_index(rec.m, rec.n);
            im += im2 >= 0 ? params[im2] : 0.0;
        }
        r[j] = re * re + im * im - rec.power;
    }
    return r;
}

Eigen::MatrixXd jacobian(const Eigen::VectorXd& params, const ParamLayout& layout,
                         const std::vector<MeasurementRecord>& records) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(records.size(), layout.size());
    for (std::size_t j = 0; j < records.size(); ++j) {
        const MeasurementRecord& rec = records[j];
        double re = params[layout.re_index(rec.i, rec.k)];
        const int im1 = layout.im_index(rec.i, rec.k);
        double im = im1 >= 0 ? params[im1] : 0.0;
        if (rec.kind == MeasurementKind::Pair) {
            re += params[layout.re_index(rec.m, rec.n)];
            const int im2 = layout.im_index(rec.m, rec.n);
            im += im2 >= 0 ? params[im2] : 0.0;
        }
        J(j, layout.re_index(rec.i, rec.k)) += 2.0 * re;
        if (im1 >= 0) J(j, im1) += 2.0 * im;
        if (rec.kind == MeasurementKind::Pair) {
            J(j, layout.re_index(rec.m, rec.n)) += 2.0 * re;
            const int im2 = layout.im_index(rec.m, rec.n);
            if (im2 >= 0) J(j, im2) += 2.0 * im;
        }
    }
    return J;
}

double objective(const Eigen::VectorXd& params, const ParamLayout& layout,
                 const std::vector<MeasurementRecord>& records) {
    return residuals(params, layout, records).squaredNorm();
}

RefineResult refine(const CalibrationEstimate& initial,
                    const std::vector<MeasurementRecord>& records,
                    const RefineSettings& settings) {
    settings.validate();
    if (records.empty()) throw IncompletePlanError("refine needs at least one record");
    const ParamLayout layout{static_cast<int>(initial.b_hat.size()),
                             static_cast<int>(initial.b_hat.front().size())};

    Eigen::VectorXd x = pack_params(initial, layout);
    Eigen::VectorXd r = residuals(x, layout, records);
    double f = r.squaredNorm();

    RefineResult result;
    result.initial_objective = f;
    double lambda = settings.damping_init;
    result.trace.push_back({0, f, lambda, 0.0, true});

    int iter = 0;
    while (iter < settings.max_iterations) {
        ++iter;
        const Eigen::MatrixXd J = jacobian(x, layout, records);
        const Eigen::VectorXd g = J.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < settings.gradient_tol) {
            result.converged = true;
            break;
        }
        const Eigen::MatrixXd h = J.transpose() * J;

        bool stepped = false;
        while (true) {
            Eigen::MatrixXd a = h;
            for (int d = 0; d < a.rows(); ++d)
                a(d, d) += lambda * std::max(h(d, d), 1e-12);
            const Eigen::VectorXd delta = a.ldlt().solve(-g);
            const double step_norm = delta.norm();
            if (step_norm < settings.step_tol) {
                result.converged = true;
                break;
            }
            const Eigen::VectorXd x_new = x + delta;
            const Eigen::VectorXd r_new = residuals(x_new, layout, records);
            const double f_new = r_new.squaredNorm();
            if (f_new < f) {
                x = x_new;
                r = r_new;
                f = f_new;
                result.trace.push_back({iter, f, lambda, step_norm, true});
                lambda = std::max(lambda / 3.0, 1e-15);
                stepped = true;
                break;
            }
            result.trace.push_back({iter, f, lambda, step_norm, false});
            lambda *= 10.0;
            if (lambda > 1e14) break;  // stalled; keep the best point found
        }
        if (!stepped) break;
    }

    result.iterations = iter;
    result.final_objective = f;
    result.estimate = unpack_params(x, layout);
    result.estimate.refs = initial.refs;
    result.estimate.lookahead_cos = initial.lookahead_cos;
    return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
    csv::write_row(out, {"iteration", "objective", "damping", "step_norm"});
    for (const auto& t : trace)
        csv::write_row(out, {csv::num(t.iteration), csv::num(t.objective), csv::num(t.damping),
                             csv::num(t.step_norm)});
}

}  // namespace phasecal
