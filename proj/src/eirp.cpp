// SPDX-License-Identifier: Apache-2.0
#include "phasecal/eirp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "phasecal/angles.hpp"

namespace phasecal {

static void check_theta(double theta) {
    if (!(std::abs(theta) <= kPi / 2 + 1e-12))
        throw std::invalid_argument("boresight angle outside [-pi/2, pi/2]");
}

static void check_codeword(const Codeword& cw, int n_antennas, int n_phases) {
    if (static_cast<int>(cw.phase_indices.size()) != n_antennas)
        throw std::invalid_argument("codeword length does not match the array");
    for (int idx : cw.phase_indices)
        if (idx < 0 || idx >= n_phases)
            throw std::invalid_argument("codeword phase index outside the grid");
}

double ideal_power(const ArrayConfig& config, const Codeword& cw, double theta) {
    check_theta(theta);
    check_codeword(cw, config.n_antennas, config.n_phases());
    const double step = config.phase_step();
    const double st = std::sin(theta);
    std::complex<double> sum(0.0, 0.0);
    for (int i = 0; i < config.n_antennas; ++i)
        sum += std::polar(1.0, cw.phase_indices[i] * step + i * kPi * st);
    return std::norm(sum);
}

double estimated_power(const Codeword& cw, const CalibrationEstimate& estimate, double theta) {
    check_theta(theta);
    const int n = static_cast<int>(estimate.b_hat.size());
    check_codeword(cw, n, static_cast<int>(estimate.b_hat.front().size()));
    const double st = std::sin(theta);
    std::complex<double> sum(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const int k = cw.phase_indices[i];
        sum += std::polar(estimate.b_hat[i][k], estimate.phi_hat[i][k] + i * kPi * st);
    }
    return std::norm(sum);
}

double true_power(const Codeword& cw, const GroundTruth& gt, double theta) {
    check_theta(theta);
    check_codeword(cw, gt.n_antennas, gt.n_phases);
    const double st = std::sin(theta);
    std::complex<double> sum(0.0, 0.0);
    for (int i = 0; i < gt.n_antennas; ++i) {
        const int k = cw.phase_indices[i];
        sum += std::polar(gt.b[i][k], gt.phi[i][k] + i * kPi * st);
    }
    return std::norm(sum);
}

Codebook design_codebook(const ArrayConfig& config, const PowerFn& power,
                         const std::vector<double>& directions_deg) {
    config.validate();
    const int n = config.n_antennas;
    const int np = config.n_phases();
    if ((n - 1) * config.q_bits > 20)
        throw std::invalid_argument("codebook search space above 2^20 settings");

    Codebook book;
    book.reserve(directions_deg.size());
    for (double dir : directions_deg) {
        const double theta = deg2rad(dir);
        Codeword cw{std::vector<int>(n, 0)};
        Codeword best = cw;
        double best_power = power(cw, theta);
        // Odometer over antennas 1..n-1, last antenna fastest: candidates come
        // out in lexicographic order, so keeping strict improvements leaves
        // the lexicographically smallest codeword on ties.
        while (true) {
            int pos = n - 1;
            while (pos >= 1 && cw.phase_indices[pos] == np - 1) cw.phase_indices[pos--] = 0;
            if (pos < 1) break;
            ++cw.phase_indices[pos];
            const double p = power(cw, theta);
            if (p > best_power) {
                best_power = p;
                best = cw;
            }
        }
        book.push_back(best);
    }
    return book;
}

double coverage_power(const GroundTruth& gt, const Codebook& codebook, double theta) {
    if (codebook.empty()) throw std::invalid_argument("empty codebook");
    double best = 0.0;
    for (std::size_t c = 0; c < codebook.size(); ++c)
        best = c == 0 ? true_power(codebook[c], gt, theta)
                      : std::max(best, true_power(codebook[c], gt, theta));
    return best;
}

std::vector<double> sphere_directions(int count, RngStream& draw) {
    std::vector<double> dirs(count);
    for (int s = 0; s < count; ++s) dirs[s] = std::asin(draw.uniform(-1.0, 1.0));
    return dirs;
}

double max_possible_eirp(const ArrayConfig& config, const ErrorSpec& spec) {
    const double peak = config.n_antennas * std::pow(10.0, spec.gain_range_db.hi / 20.0);
    return peak * peak;
}

double scaled_eirp_db(double power, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("EIRP scale must be positive");
    return 10.0 * std::log10(std::max(power, 1e-300) / scale);
}

static double quantile(const std::vector<double>& sorted, double q) {
    const std::size_t m = sorted.size();
    if (m == 0) throw std::invalid_argument("quantile of an empty sample");
    const double pos = q * static_cast<double>(m - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= m) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

EirpReport make_eirp_report(std::vector<double> directions_deg, std::vector<double> power,
                            double scale) {
    if (directions_deg.size() != power.size())
        throw std::invalid_argument("directions and powers disagree in length");
    EirpReport rep;
    rep.cdf_db.resize(power.size());
    for (std::size_t s = 0; s < power.size(); ++s) rep.cdf_db[s] = scaled_eirp_db(power[s], scale);
    std::sort(rep.cdf_db.begin(), rep.cdf_db.end());
    rep.cdf_prob.resize(rep.cdf_db.size());
    for (std::size_t s = 0; s < rep.cdf_db.size(); ++s)
        rep.cdf_prob[s] = static_cast<double>(s + 1) / rep.cdf_db.size();
    rep.percentiles_db[50] = quantile(rep.cdf_db, 0.50);
    rep.percentiles_db[99] = quantile(rep.cdf_db, 0.99);
    rep.directions_deg = std::move(directions_deg);
    rep.power = std::move(power);
    return rep;
}

std::vector<EirpReport> eirp_cdf(const ArrayConfig& config, const ErrorSpec& spec,
                                 const std::vector<CodebookSource>& sources, int sphere_samples,
                                 const std::vector<std::uint64_t>& instance_seeds, Exec exec) {
    if (sphere_samples < 1) throw std::invalid_argument("sphere_samples must be >= 1");
    if (sources.empty()) throw std::invalid_argument("need at least one codebook source");
    const int n_inst = static_cast<int>(instance_seeds.size());
    const int n_src = static_cast<int>(sources.size());

    // slot [instance][source] of (directions, powers)
    struct Slot {
        std::vector<double> dirs_deg;
        std::vector<std::vector<double>> power;
    };
    std::vector<Slot> slots(n_inst);

    auto eval = [&](int t) {
        const std::uint64_t inst = instance_seeds[t];
        const GroundTruth gt = generate_ground_truth(config, spec, substream_seed(inst, 0));
        RngStream dir_draw(substream_seed(inst, 1));
        const std::vector<double> thetas = sphere_directions(sphere_samples, dir_draw);

        Slot slot;
        slot.dirs_deg.resize(sphere_samples);
        for (int s = 0; s < sphere_samples; ++s) slot.dirs_deg[s] = rad2deg(thetas[s]);
        slot.power.resize(n_src);
        for (int c = 0; c < n_src; ++c) {
            const Codebook book = sources[c](gt, substream_seed(inst, 2 + c));
            slot.power[c].resize(sphere_samples);
            for (int s = 0; s < sphere_samples; ++s)
                slot.power[c][s] = coverage_power(gt, book, thetas[s]);
        }
        slots[t] = std::move(slot);
    };

    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < n_inst; ++t) eval(t);
    } else {
        for (int t = 0; t < n_inst; ++t) eval(t);
    }

    const double scale = max_possible_eirp(config, spec);
    std::vector<EirpReport> reports;
    reports.reserve(n_src);
    for (int c = 0; c < n_src; ++c) {
        std::vector<double> dirs, power;
        dirs.reserve(static_cast<std::size_t>(n_inst) * sphere_samples);
        power.reserve(dirs.capacity());
        for (int t = 0; t < n_inst; ++t) {
            dirs.insert(dirs.end(), slots[t].dirs_deg.begin(), slots[t].dirs_deg.end());
            power.insert(power.end(), slots[t].power[c].begin(), slots[t].power[c].end());
        }
        reports.push_back(make_eirp_report(std::move(dirs), std::move(power), scale));
    }
    return reports;
}

}  // namespace phasecal
