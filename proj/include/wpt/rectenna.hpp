// SPDX-License-Identifier: Apache-2.0
//
// Truncated-Taylor diode model. The rectenna output is summarized by
//
//     z_DC = sum_{even i <= n_o} k_i R_ant^{i/2} E{y(t)^i},
//     k_i  = i_s / (i! (n v_t)^i),
//
// where y(t) is the received multisine. E{y^i} is computed from the complex
// received tone coefficients X_n e^{j delta_n}; a brute-force time average is
// provided as an independent check.

#pragma once

#include "wpt/channel.hpp"
#include "wpt/gp.hpp"
#include "wpt/polynomial.hpp"
#include "wpt/waveform.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace wpt {

struct DiodeParams {
    double i_s = 5e-6;       // saturation current [A]
    double n = 1.05;         // ideality factor
    double v_t = 25.86e-3;   // thermal voltage [V]
    double r_ant = 50.0;     // antenna resistance [ohm]
    double r_load = 1600.0;  // load resistance [ohm]

    void validate() const;
    double n_vt() const { return n * v_t; }
};

/// k_i for i = 2, 4, ..., order (entry j holds k_{2j+2}).
std::vector<double> taylor_coefficients(const DiodeParams& diode, int order);

struct RectennaParams {
    DiodeParams diode;
    int order = 4;  // n_o, one of 2, 4, 6

    void validate() const;
    std::vector<double> k() const { return taylor_coefficients(diode, order); }
};

/// Per-tone received coefficient X_n e^{j delta_n} = sum_m h(n,m) w(n,m).
Eigen::VectorXcd received_tone_coefficients(const Waveform& w, const ChannelRealization& h);

/// E{y^2}, E{y^4}, E{y^6} of y(t) = Re sum_n X_n e^{j w_n t}. Orders above
/// `order` are left at zero. Index sets n0+n1 = n2+n3 (and the 6-fold
/// analogue) are enumerated directly.
struct EvenMoments {
    double m2 = 0.0;
    double m4 = 0.0;
    double m6 = 0.0;
};
EvenMoments even_moments(const Eigen::VectorXcd& tones, int order);

/// Per-order contributions k_i R^{i/2} E{y^i} and their sum.
struct ZdcBreakdown {
    double order2 = 0.0;
    double order4 = 0.0;
    double order6 = 0.0;
    double total() const { return order2 + order4 + order6; }
};
ZdcBreakdown zdc_breakdown(const Eigen::VectorXcd& tones, const RectennaParams& p);

double zdc_from_tones(const Eigen::VectorXcd& tones, const RectennaParams& p);
double zdc_analytic(const Waveform& w, const ChannelRealization& h, const RectennaParams& p);

/// Averages y(t)^i over one envelope period. Requires f0 to be an integer
/// multiple of the tone spacing; uses sample_factor * n_o * (G + N) uniform
/// samples where G = f0 / spacing, which integrates every product harmonic
/// exactly.
double zdc_time_average(const Waveform& w, const ChannelRealization& h, const RectennaParams& p,
                        int sample_factor = 16);

/// Root of exp(R_L i / (n v_t)) (i + i_s) = i_s + z, bracketed in [0, z].
double iout_fixed_point(double zdc, const RectennaParams& p);

/// x_m(t) = sum_n s(n,m) cos(w_n t + phi(n,m)) at the given instants.
std::vector<double> synthesize_transmit(const Waveform& w, std::size_t antenna,
                                        std::span<const double> times_s);

/// max_q x_m(t_q)^2 / (0.5 ||s_m||^2) over t_q = q T / (N O_s), q < N O_s.
double papr(const Waveform& w, std::size_t antenna, int oversampling);

/// Number of ordered index tuples with n_0 + ... + n_{k-1} = n_k + ... + n_{2k-1},
/// where order = 2k and each index ranges over [0, N).
std::uint64_t count_index_tuples(std::size_t tones, int order);

/// Maps amplitude variable (n, m) to its position in the GP variable vector.
inline std::size_t amplitude_index(std::size_t n, std::size_t m, std::size_t antennas)
{
    return n * antennas + m;
}

/// z_DC as a polynomial in the amplitudes s(n,m) with the phases fixed, i.e.
/// psi(n,m) = phase(n,m) + arg h(n,m) (complex coefficients before taking the
/// real part).
SparsePolynomial zdc_polynomial(const ChannelRealization& h, const Eigen::MatrixXd& phases,
                                const RectennaParams& p);

/// z_DC(S, Phi*) as a posynomial in s(n,m).
gp::Posynomial zdc_posynomial(const ChannelRealization& h, const RectennaParams& p);

/// sum_u v_u z_DC,u(S, Phi') split into positive and negative parts.
gp::Signomial weighted_sum_signomial(const std::vector<ChannelRealization>& h,
                                     const std::vector<double>& weights, const RectennaParams& p,
                                     const Eigen::MatrixXd& phases);

/// Flattens an N x M amplitude matrix into the GP variable vector and back.
Eigen::VectorXd flatten_amplitudes(const Eigen::MatrixXd& s);
Eigen::MatrixXd unflatten_amplitudes(const Eigen::VectorXd& x, std::size_t tones,
                                     std::size_t antennas);

}  // namespace wpt
