// SPDX-License-Identifier: Apache-2.0
//
// Counter-keyed random streams: every (seed, index) pair maps to an
// independent, reproducible engine, so Monte Carlo trials can be generated in
// any order or on any worker and still produce identical samples.

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace wpt {

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t index)
        : engine_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)))
    {
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance = 1.0)
    {
        const double sigma = std::sqrt(0.5 * variance);
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {sigma * re, sigma * im};
    }

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace wpt
