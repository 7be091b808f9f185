// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace wpt {

/// Evenly spaced tones f_n = f0 + n * spacing, n = 0 .. tones-1.
struct FrequencyGrid {
    std::size_t tones = 1;
    double f0_hz = 1.0e7;
    double spacing_hz = 1.0e5;

    double tone_hz(std::size_t n) const { return f0_hz + static_cast<double>(n) * spacing_hz; }
    double angular(std::size_t n) const { return 2.0 * std::numbers::pi * tone_hz(n); }
    double max_hz() const { return tone_hz(tones - 1); }

    /// Period of the multisine envelope, 1/spacing.
    double period_s() const { return 1.0 / spacing_hz; }

    /// f0 / spacing; integral when the waveform is periodic in period_s().
    double harmonic_offset() const { return f0_hz / spacing_hz; }

    bool commensurate() const
    {
        const double g = harmonic_offset();
        return std::abs(g - std::round(g)) <= 1e-9 * std::max(1.0, std::abs(g));
    }

    void validate() const
    {
        if (tones < 1) throw std::invalid_argument("frequency grid needs at least one tone");
        if (!(spacing_hz > 0.0) || !std::isfinite(spacing_hz))
            throw std::invalid_argument("tone spacing must be positive");
        if (!(f0_hz >= 0.0) || !std::isfinite(f0_hz))
            throw std::invalid_argument("start frequency must be non-negative");
    }

    /// Grid with f0 = harmonic * spacing so that the envelope is periodic.
    static FrequencyGrid commensurate_grid(std::size_t tones, double spacing_hz,
                                           long harmonic = 100)
    {
        return {tones, static_cast<double>(harmonic) * spacing_hz, spacing_hz};
    }

    /// N tones spread over `bandwidth` (spacing = B/N) around `center`, with
    /// f0 snapped to a multiple of the spacing.
    static FrequencyGrid centered(std::size_t tones, double center_hz, double bandwidth_hz)
    {
        const double spacing = bandwidth_hz / static_cast<double>(tones);
        const double start = center_hz - 0.5 * static_cast<double>(tones - 1) * spacing;
        return {tones, std::round(start / spacing) * spacing, spacing};
    }
};

}  // namespace wpt
