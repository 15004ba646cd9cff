// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <set>

#include "doctest.h"
#include "phasecal/angles.hpp"
#include "phasecal/rng.hpp"

using namespace phasecal;

TEST_CASE("wrap_pi maps into (-pi, pi]") {
    CHECK(wrap_pi(0.0) == 0.0);
    CHECK(wrap_pi(kPi) == doctest::Approx(kPi));
    CHECK(wrap_pi(-kPi) == doctest::Approx(kPi));  // -pi is excluded, maps to +pi
    CHECK(wrap_pi(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_pi(kTwoPi + 0.25) == doctest::Approx(0.25));
    CHECK(wrap_pi(-kTwoPi - 0.25) == doctest::Approx(-0.25));
    for (int i = -20; i <= 20; ++i) {
        const double a = 0.7 * i;
        const double w = wrap_pi(a);
        CHECK(w > -kPi - 1e-15);
        CHECK(w <= kPi + 1e-15);
        CHECK(std::remainder(a - w, kTwoPi) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("degree conversions round-trip") {
    CHECK(deg2rad(180.0) == doctest::Approx(kPi));
    CHECK(rad2deg(kPi / 2) == doctest::Approx(90.0));
    CHECK(rad2deg(deg2rad(-37.5)) == doctest::Approx(-37.5));
}

TEST_CASE("substream seeds are deterministic and spread out") {
    CHECK(substream_seed(1, 0) == substream_seed(1, 0));
    CHECK(substream_seed(1, 0) != substream_seed(1, 1));
    CHECK(substream_seed(1, 0) != substream_seed(2, 0));
    // chained form equals the nested form
    CHECK(substream_seed(9, 3, 7) == substream_seed(substream_seed(9, 3), 7));

    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 16; ++s)
        for (std::uint64_t i = 0; i < 16; ++i) seen.insert(substream_seed(s, i));
    CHECK(seen.size() == 256);  // no collisions in a small grid
}

TEST_CASE("uniform01 stays in [0, 1) and reproduces") {
    RngStream a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const double x = a.uniform01();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        CHECK(x == b.uniform01());
    }
}

TEST_CASE("uniform(lo, hi) respects bounds") {
    RngStream s(7);
    for (int i = 0; i < 1000; ++i) {
        const double x = s.uniform(-1.5, 1.5);
        CHECK(x >= -1.5);
        CHECK(x <= 1.5);
    }
}

TEST_CASE("gaussian pairs have roughly standard moments") {
    RngStream s(2024);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n / 2; ++i) {
        auto [g1, g2] = s.gaussian_pair();
        sum += g1 + g2;
        sumsq += g1 * g1 + g2 * g2;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}
