// SPDX-License-Identifier: Apache-2.0
//
// Multipath channel realizations and their per-tone frequency responses.

#pragma once

#include "wpt/grid.hpp"

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace wpt {

struct PowerDelayProfile {
    struct Tap {
        double delay_s;
        double mean_power;
    };
    std::vector<Tap> taps;

    /// Throws std::invalid_argument unless powers are positive and sum to one
    /// and delays are non-negative and nondecreasing.
    void validate() const;

    /// `count` taps spaced by `tap_spacing_s` whose mean power decays as
    /// exp(-delay / decay_s), normalized to unit total power.
    static PowerDelayProfile exponential(std::size_t count = 18, double tap_spacing_s = 40e-9,
                                         double decay_s = 100e-9);
};

/// One drawn multipath component alpha e^{j xi} with its delay.
struct PathGain {
    std::complex<double> gain;
    double delay_s;
};
using TapSet = std::vector<PathGain>;

/// Uniform linear array; per-tone wavelengths follow from the frequency grid.
struct ArrayConfig {
    std::size_t antennas = 1;
    double spacing_m = 0.029;  // half a wavelength at 5.18 GHz

    void validate() const;
};

/// Frequency response h(n,m) of one rectenna's channel.
struct ChannelRealization {
    Eigen::MatrixXcd response;  // tones x antennas
    FrequencyGrid grid;

    std::size_t tones() const { return static_cast<std::size_t>(response.rows()); }
    std::size_t antennas() const { return static_cast<std::size_t>(response.cols()); }

    Eigen::MatrixXd amplitudes() const { return response.cwiseAbs(); }
    Eigen::MatrixXd phases() const;
    /// ||h_n|| per tone.
    Eigen::VectorXd tone_norms() const { return response.rowwise().norm(); }
};

/// Draws each tap as CN(0, beta_l); deterministic for fixed (seed, index).
TapSet generate_taps(const PowerDelayProfile& profile, std::uint64_t seed, std::uint64_t index = 0);

/// h(n,m) = sum_l alpha_l exp(j(-w_n tau_l + xi_l + Delta(n,m,l))) with the ULA
/// phase shift Delta = 2 pi (m-1) (d / lambda_n) cos(theta_l).
ChannelRealization frequency_response(const TapSet& taps, const ArrayConfig& array,
                                      const std::vector<double>& directions_rad,
                                      const FrequencyGrid& grid);

/// Draws taps and departure angles (uniform on [0, 2 pi)) for one realization.
ChannelRealization multipath_channel(const PowerDelayProfile& profile, const ArrayConfig& array,
                                     const FrequencyGrid& grid, std::uint64_t seed,
                                     std::uint64_t index = 0);

/// Entries i.i.d. CN(0,1) across tones, antennas and rectennas.
std::vector<ChannelRealization> iid_frequency_channel(const FrequencyGrid& grid, std::size_t antennas,
                                                      std::size_t rectennas, std::uint64_t seed,
                                                      std::uint64_t index = 0);

/// Every entry equal to A e^{j psi}.
ChannelRealization flat_channel(double amplitude, double phase, const FrequencyGrid& grid,
                                std::size_t antennas);

/// Text format: '#' comment lines, then one line per tone with re/im pairs per
/// antenna. A blank line separates rectennas.
void write_channel(std::ostream& os, const std::vector<ChannelRealization>& channels);
std::vector<ChannelRealization> read_channel(std::istream& is, const FrequencyGrid& grid);

}  // namespace wpt
