// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wpt/grid.hpp"

#include <Eigen/Dense>
#include <iosfwd>

namespace wpt {

/// Multisine multi-antenna transmit waveform: amplitude s(n,m) >= 0 and
/// phase phi(n,m) of tone n on antenna m.
struct Waveform {
    Eigen::MatrixXd amplitude;
    Eigen::MatrixXd phase;
    FrequencyGrid grid;

    Waveform() = default;
    Waveform(Eigen::MatrixXd s, Eigen::MatrixXd phi, FrequencyGrid g);

    std::size_t tones() const { return static_cast<std::size_t>(amplitude.rows()); }
    std::size_t antennas() const { return static_cast<std::size_t>(amplitude.cols()); }

    /// Average transmit power 0.5 * ||S||_F^2.
    double transmit_power() const { return 0.5 * amplitude.squaredNorm(); }

    /// Complex weights w(n,m) = s e^{j phi}.
    Eigen::MatrixXcd weights() const;

    bool power_feasible(double budget, double rel_tol = 1e-9) const
    {
        return transmit_power() <= budget * (1.0 + rel_tol);
    }
};

/// Plain-text waveform file. Header keys (tones, antennas, f0_hz, spacing_hz,
/// power_w) followed by one row per tone holding s, phi pairs per antenna.
/// Doubles are written in shortest round-trip form, so read(write(w)) == w
/// bit for bit.
void write_waveform(std::ostream& os, const Waveform& w, double power_budget);

struct WaveformFile {
    Waveform waveform;
    double power_budget = 0.0;
};

WaveformFile read_waveform(std::istream& is);

}  // namespace wpt
