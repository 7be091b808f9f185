// SPDX-License-Identifier: Apache-2.0
//
// Average z_DC (fourth-order model) of non-adaptive and adaptive waveforms
// over Rayleigh channels, in closed form and by Monte Carlo.

#pragma once

#include "wpt/rectenna.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wpt::scaling {

enum class Strategy { ss, up, ass, upmf };
enum class Regime { flat, selective };

std::string_view to_string(Strategy s);
std::string_view to_string(Regime r);
Strategy parse_strategy(std::string_view s);
Regime parse_regime(std::string_view s);

struct Scenario {
    Strategy strategy = Strategy::up;
    Regime regime = Regime::flat;
    std::size_t tones = 1;
    std::size_t antennas = 1;
    std::size_t rectennas = 1;
    double power = 1e-5;
    RectennaParams params;

    /// Throws std::invalid_argument for combinations without a closed form.
    void validate() const;
};

/// H_N = sum_{k<=N} 1/k and S_N = sum_{k<=N} H_k / k by forward recursion.
double harmonic_H(std::size_t n);
double harmonic_S(std::size_t n);

/// The alternating binomial sums N sum_k (-1)^{k+N-1} C(N-1,k) / (N-k)^p for
/// p = 2 (H_N) and p = 3 (S_N). They cancel catastrophically beyond N ~ 20.
double harmonic_H_alternating(std::size_t n);
double harmonic_S_alternating(std::size_t n);

constexpr double euler_gamma = 0.57721566490153286061;
constexpr double stieltjes_gamma1 = -0.07281584548367672486;

/// Exact value (lower == upper) or bracketing interval.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool exact() const { return lower == upper; }
    double mid() const { return 0.5 * (lower + upper); }
};

/// Finite-(N, M) average z_DC. Only the UPMF / selective case is an interval.
Interval closed_form(const Scenario& sc);

/// Large-N (and large-M where applicable) trends; informational only.
double asymptotic(const Scenario& sc);

struct MonteCarloResult {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t trials = 0;
};

/// Channel draws: flat -> one Rayleigh gain per antenna (sum of the taps of
/// the default delay profile), shared by all tones; selective -> i.i.d.
/// CN(0,1) per tone and antenna. Deterministic in (seed, trial) and
/// independent of the worker count.
MonteCarloResult monte_carlo(const Scenario& sc, std::size_t trials, std::uint64_t seed,
                             std::size_t workers = 1);

struct HardeningRow {
    std::size_t antennas = 0;
    double norm_deviation = 0.0;  // median |  ||h_n|| / sqrt(M) - 1 |
    double zdc_deviation = 0.0;   // median | z / z_hardened - 1 |
    double zdc_hardened = 0.0;    // UPMF value when ||h_n|| = sqrt(M) on every tone
};

/// UPMF over i.i.d. selective channels for each antenna count in `antenna_counts`.
std::vector<HardeningRow> hardening_curve(const std::vector<std::size_t>& antenna_counts,
                                          std::size_t tones, double power, std::uint64_t seed,
                                          std::size_t trials, const RectennaParams& params = {});

/// Header and one row per scenario:
/// strategy,regime,tones,antennas,rectennas,power_w,closed_form,closed_form_upper,mc_mean,mc_stderr
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const Scenario& sc, const Interval& cf, const MonteCarloResult& mc);

}  // namespace wpt::scaling
