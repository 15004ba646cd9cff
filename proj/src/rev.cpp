// SPDX-License-Identifier: Apache-2.0
#include "phasecal/rev.hpp"

#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>

#include "phasecal/angles.hpp"
#include "phasecal/csv.hpp"

namespace phasecal {

RevResult rev_calibrate(const GroundTruth& gt, const NoiseModel& noise,
                        const RevOptions& options) {
    if (options.iterations < 1) throw std::invalid_argument("rev iterations must be >= 1");
    if (gt.n_antennas < 2) throw std::invalid_argument("rev needs at least two antennas");
    const int n = gt.n_antennas;
    const int np = gt.n_phases;
    const double step = kTwoPi / np;

    std::vector<double> correction(n, 0.0);  // accumulated continuous phase offsets
    std::uint64_t ordinal = 0;

    RevResult result;
    result.measurement_count = options.iterations * n * np;

    for (int it = 0; it < options.iterations; ++it) {
        RevIteration snap;
        snap.rel_amplitude.resize(n);
        snap.rel_phase.resize(n);
        snap.b_hat.resize(n);
        snap.degenerate.assign(n, 0);
        std::vector<double> theta_star(n, 0.0);

        for (int i = 0; i < n; ++i) {
            std::vector<double> power(np);
            for (int k = 0; k < np; ++k) {
                std::complex<double> field(0.0, 0.0);
                for (int m = 0; m < n; ++m) {
                    const int setting = m == i ? k : 0;
                    field += std::polar(gt.b[m][setting], gt.phi[m][setting] + correction[m]);
                }
                RngStream draw(substream_seed(noise.seed, ordinal++));
                power[k] = noisy_power(std::abs(field), noise, draw);
            }

            if (options.dft_fit) {
                // P(k) = A + B cos(k step + g); the first DFT bin isolates B
                // and g, and (A, B) split into element and rest amplitudes.
                std::complex<double> bin(0.0, 0.0);
                double mean = 0.0;
                for (int k = 0; k < np; ++k) {
                    bin += power[k] * std::polar(1.0, -k * step);
                    mean += power[k];
                }
                mean /= np;
                const double bamp = 2.0 * std::abs(bin) / np;
                const double gamma = std::arg(bin);
                theta_star[i] = -gamma;
                const double disc = std::sqrt(std::max(mean * mean - bamp * bamp, 0.0));
                const double elem = std::sqrt(std::max((mean - disc) / 2.0, 0.0));
                const double rest = std::sqrt(std::max((mean + disc) / 2.0, 0.0));
                snap.b_hat[i] = elem;
                snap.rel_amplitude[i] = rest > 0.0 ? elem / rest : 0.0;
                snap.degenerate[i] = bamp < 1e-3 * std::max(mean, 1e-300) ? 1 : 0;
            } else {
                int kmax = 0, kmin = 0;
                for (int k = 1; k < np; ++k) {
                    if (power[k] > power[kmax]) kmax = k;
                    if (power[k] < power[kmin]) kmin = k;
                }
                const double sa = std::sqrt(std::max(power[kmax], 0.0));
                const double si = std::sqrt(std::max(power[kmin], 0.0));
                theta_star[i] = kmax * step;
                snap.b_hat[i] = (sa - si) / 2.0;
                snap.rel_amplitude[i] = sa + si > 0.0 ? (sa - si) / (sa + si) : 0.0;
                snap.degenerate[i] =
                    power[kmax] - power[kmin] < 1e-3 * std::max(power[kmax], 1e-300) ? 1 : 0;
            }
            snap.rel_phase[i] = wrap_pi(-(correction[i] + theta_star[i]));
        }

        // All sweeps of one pass use the corrections of the previous pass;
        // compose only once the pass is complete.
        for (int i = 0; i < n; ++i) correction[i] += theta_star[i];
        result.iterations.push_back(std::move(snap));
    }
    return result;
}

void write_rev_csv(std::ostream& out, const RevResult& result) {
    csv::write_row(out, {"antenna", "rel_amplitude", "rel_phase_rad", "iteration"});
    for (std::size_t it = 0; it < result.iterations.size(); ++it) {
        const RevIteration& snap = result.iterations[it];
        for (std::size_t i = 0; i < snap.rel_amplitude.size(); ++i)
            csv::write_row(out, {csv::num(static_cast<int>(i)), csv::num(snap.rel_amplitude[i]),
                                 csv::num(snap.rel_phase[i]), csv::num(static_cast<int>(it + 1))});
    }
}

}  // namespace phasecal
