// SPDX-License-Identifier: Apache-2.0
//
// Transient simulation of a single series diode feeding a parallel RC load,
// driven by v_in(t) = sqrt(R_ant) y(t) under ideal matching:
//
//     C dv/dt = i_s (exp((v_in - v) / (n v_t)) - 1) - v / R_L
//
// Integrated with the implicit trapezoidal rule and a scalar Newton solve per
// step.

#pragma once

#include "wpt/channel.hpp"
#include "wpt/rectenna.hpp"
#include "wpt/waveform.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace wpt {

struct CircuitParams {
    DiodeParams diode;
    double c_out = 100e-12;  // F
    double r_load = 0.0;     // ohm; 0 keeps diode.r_load

    double load() const { return r_load > 0.0 ? r_load : diode.r_load; }
    void validate() const;
};

struct SimOptions {
    double step_scale = 1.0;      // multiplies the default step
    int min_periods = 2;
    int max_periods = 200;
    double steady_tol = 1e-6;     // relative change of the period-mean output
    double initial_v_out = 0.0;   // V
    int max_halvings = 12;        // Newton fallback: split a step up to 2^12 ways
};

struct SimTrace {
    // Final simulated period only.
    std::vector<double> t;
    std::vector<double> v_in;
    std::vector<double> v_out;
    std::vector<double> i_d;
    std::vector<double> period_means;  // mean v_out of every simulated period
    double period_s = 0.0;
    double r_load = 0.0;
    std::size_t steps_per_period = 0;
    bool steady = false;

    double final_mean() const { return period_means.empty() ? 0.0 : period_means.back(); }
};

/// Default step count for one period: ceil(T / min(1/(200 f_max), R_L C / 50)).
std::size_t default_steps_per_period(double period_s, double f_max_hz, const CircuitParams& c);

/// Simulates the rectifier driven by one period of v_in samples repeated
/// indefinitely; sample k sits at time k * period / samples.size().
SimTrace simulate_source(std::span<const double> v_in_period, double period_s, const CircuitParams& c,
                         const SimOptions& opts = {});

/// Synthesizes sqrt(R_ant) y(t) for waveform w through channel h and simulates.
SimTrace simulate(const Waveform& w, const ChannelRealization& h, const CircuitParams& c,
                  const SimOptions& opts = {});

/// Root of i_s (exp((V - v)/(n v_t)) - 1) = v / R_L.
double dc_operating_point(double v_in, const CircuitParams& c);

/// (mean v_out over the final period)^2 / R_L; throws SimulationError when
/// the trace did not reach steady state.
double harvested_dc_power(const SimTrace& trace);

/// CSV "t,v_in,v_out,i_d" keeping every `decimation`-th sample.
void write_trace_csv(std::ostream& os, const SimTrace& trace, std::size_t decimation = 1);

}  // namespace wpt
