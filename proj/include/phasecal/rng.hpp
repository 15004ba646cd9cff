// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <utility>

#include "phasecal/angles.hpp"

namespace phasecal {

// splitmix64 finalizer; avalanches a 64-bit value.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives the seed of child stream `index` from a parent seed. Chaining calls
// gives a stream tree, e.g. substream_seed(master, snr_index, iter_index), so
// any Monte Carlo instance or single measurement can be reproduced in
// isolation no matter how work is scheduled across threads.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ mix64(index ^ 0xa5a5a5a5a5a5a5a5ULL));
}

template <typename... Rest>
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index, Rest... rest) {
    return substream_seed(substream_seed(seed, index), rest...);
}

// Deterministic random stream. Conversions to doubles are done by hand so the
// produced sequences are pinned down by this file alone.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // One pair of independent standard normals (Box-Muller); consumes exactly
    // two 64-bit draws.
    std::pair<double, double> gaussian_pair() {
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace phasecal
