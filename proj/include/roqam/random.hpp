#pragma once

// Counter-based Gaussian sampler.
//
// Sample k of stream (seed, stream) is a pure function of (seed, stream, k):
//
//   key     = splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019))
//   word(c) = splitmix64(key + c * 0x9E3779B97F4A7C15)
//   u(c)    = ((word(c) >> 11) + 1) * 2^-53           in (0, 1]
//
// A pair of normals (z0, z1) for pair index k comes from Box-Muller on
// u(2k), u(2k+1).  No std:: distribution is involved, so the sequence does
// not depend on the standard-library implementation.

#include "roqam/core.hpp"

#include <cstdint>
#include <utility>

namespace roqam {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class CounterNormal {
public:
    CounterNormal(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

    double uniform(std::uint64_t counter) const noexcept {
        const std::uint64_t w = splitmix64(key_ + counter * 0x9E3779B97F4A7C15ULL);
        return static_cast<double>((w >> 11) + 1) * 0x1.0p-53;
    }

    /// Two independent standard normals for pair index k.
    std::pair<double, double> normal_pair(std::uint64_t k) const {
        const double u1 = uniform(2 * k);
        const double u2 = uniform(2 * k + 1);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * kPi * u2;
        return {rad * std::cos(ang), rad * std::sin(ang)};
    }

private:
    std::uint64_t key_;
};

}  // namespace roqam
