// SPDX-License-Identifier: Apache-2.0

#include "wpt/circuit.hpp"

#include "wpt/errors.hpp"
#include "wpt/format.hpp"
#include "wpt/simd/kernels.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace wpt {

void CircuitParams::validate() const
{
    diode.validate();
    if (!(c_out > 0.0) || !std::isfinite(c_out)) throw std::invalid_argument("output capacitance must be positive");
    if (r_load < 0.0 || !std::isfinite(r_load)) throw std::invalid_argument("load resistance must be positive");
}

std::size_t default_steps_per_period(double period_s, double f_max_hz, const CircuitParams& c)
{
    const double h = std::min(1.0 / (200.0 * f_max_hz), c.load() * c.c_out / 50.0);
    // Shave rounding noise so that an exact ratio is not bumped to the next integer.
    return static_cast<std::size_t>(std::ceil(period_s / h * (1.0 - 1e-12)));
}

namespace {

struct Diode {
    double is;
    double nvt;
    double c;
    double r;

    double current(double v_in, double v) const { return is * std::expm1((v_in - v) / nvt); }
    double rhs(double v_in, double v) const { return current(v_in, v) - v / r; }
};

// One trapezoidal step from (v, f_start) to the next sample; returns the new
// voltage and stores rhs at the end point in f_end. Splits the interval if
// Newton fails to converge.
double trapezoid_step(const Diode& d, double v, double f_start, double vin_end, double vin_start, double h,
                      int halvings_left, double& f_end)
{
    const double a = d.c / h;
    double x = v;
    for (int it = 0; it < 80; ++it) {
        const double e = std::exp((vin_end - x) / d.nvt);
        const double f = d.is * (e - 1.0) - x / d.r;
        const double g = a * (x - v) - 0.5 * (f + f_start);
        const double dg = a + 0.5 * (d.is * e / d.nvt + 1.0 / d.r);
        const double dx = g / dg;
        x -= dx;
        if (!std::isfinite(x)) break;
        if (std::abs(dx) <= 1e-15 + 1e-13 * std::abs(x)) {
            f_end = d.rhs(vin_end, x);
            return x;
        }
    }
    if (halvings_left <= 0) throw SimulationError("diode Newton iteration did not converge");
    const double vin_mid = 0.5 * (vin_start + vin_end);
    double f_mid = 0.0;
    const double v_mid = trapezoid_step(d, v, f_start, vin_mid, vin_start, 0.5 * h, halvings_left - 1, f_mid);
    return trapezoid_step(d, v_mid, f_mid, vin_end, vin_mid, 0.5 * h, halvings_left - 1, f_end);
}

}  // namespace

SimTrace simulate_source(std::span<const double> v_in_period, double period_s, const CircuitParams& c,
                         const SimOptions& opts)
{
    c.validate();
    if (v_in_period.empty()) throw std::invalid_argument("source period has no samples");
    if (!(period_s > 0.0)) throw std::invalid_argument("source period must be positive");
    if (opts.min_periods < 2 || opts.max_periods < opts.min_periods)
        throw std::invalid_argument("need 2 <= min_periods <= max_periods");

    const Diode d{c.diode.i_s, c.diode.n_vt(), c.c_out, c.load()};
    const std::size_t k_count = v_in_period.size();
    const double h = period_s / static_cast<double>(k_count);

    SimTrace tr;
    tr.period_s = period_s;
    tr.r_load = d.r;
    tr.steps_per_period = k_count;
    tr.t.resize(k_count);
    tr.v_in.assign(v_in_period.begin(), v_in_period.end());
    tr.v_out.resize(k_count);
    tr.i_d.resize(k_count);
    for (std::size_t k = 0; k < k_count; ++k) tr.t[k] = static_cast<double>(k) * h;

    double v = opts.initial_v_out;
    double f = d.rhs(v_in_period[0], v);
    // Output voltage at the start of each period since the last extrapolation.
    std::vector<double> starts;
    for (int p = 0; p < opts.max_periods; ++p) {
        starts.push_back(v);
        double sum = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            const double vin = v_in_period[k];
            const double vin_next = v_in_period[k + 1 == k_count ? 0 : k + 1];
            tr.v_out[k] = v;
            tr.i_d[k] = d.current(vin, v);
            sum += v;
            double f_next = 0.0;
            v = trapezoid_step(d, v, f, vin_next, vin, h, opts.max_halvings, f_next);
            f = f_next;
        }
        const double mean = sum / static_cast<double>(k_count);
        tr.period_means.push_back(mean);
        if (p + 1 >= opts.min_periods) {
            const double prev = tr.period_means[tr.period_means.size() - 2];
            if (std::abs(mean - prev) <= opts.steady_tol * std::abs(mean) + 1e-15) {
                tr.steady = true;
                break;
            }
        }
        // Slow RC loads approach the periodic orbit geometrically; Aitken's
        // extrapolation of the period-start voltage skips most of the transient.
        // The steady test above still runs on integrated periods only.
        if (starts.size() >= 3) {
            const double d0 = starts[starts.size() - 1] - starts[starts.size() - 2];
            const double d1 = v - starts.back();
            const double rho = d0 != 0.0 ? d1 / d0 : 0.0;
            if (rho > 0.05 && rho < 0.98) {
                v += rho / (1.0 - rho) * d1;
                f = d.rhs(v_in_period[0], v);
                starts.clear();
            }
        }
    }
    return tr;
}

SimTrace simulate(const Waveform& w, const ChannelRealization& h, const CircuitParams& c, const SimOptions& opts)
{
    c.validate();
    if (w.tones() != h.tones() || w.antennas() != h.antennas())
        throw std::invalid_argument("waveform and channel dimensions differ");
    if (!w.grid.commensurate())
        throw std::invalid_argument("circuit simulation needs f0 to be a multiple of the tone spacing");
    if (!(opts.step_scale > 0.0)) throw std::invalid_argument("step scale must be positive");

    const double period = w.grid.period_s();
    const auto steps = static_cast<std::size_t>(
        std::ceil(static_cast<double>(default_steps_per_period(period, w.grid.max_hz(), c)) / opts.step_scale));
    const auto g = static_cast<std::int64_t>(std::llround(w.grid.harmonic_offset()));
    std::vector<double> y(steps, 0.0);
    const auto& kern = simd::kernels();
    for (std::size_t n = 0; n < w.tones(); ++n) {
        const double step = 2.0 * std::numbers::pi * static_cast<double>(g + static_cast<std::int64_t>(n)) /
                            static_cast<double>(steps);
        for (std::size_t m = 0; m < w.antennas(); ++m) {
            const auto ni = static_cast<Eigen::Index>(n);
            const auto mi = static_cast<Eigen::Index>(m);
            const double amp = w.amplitude(ni, mi) * std::abs(h.response(ni, mi));
            if (amp == 0.0) continue;
            kern.accumulate_cosine(y.data(), steps, amp, w.phase(ni, mi) + std::arg(h.response(ni, mi)), step);
        }
    }
    const double scale = std::sqrt(c.diode.r_ant);
    for (double& v : y) v *= scale;
    return simulate_source(y, period, c, opts);
}

double dc_operating_point(double v_in, const CircuitParams& c)
{
    c.validate();
    if (!std::isfinite(v_in)) throw std::invalid_argument("source voltage must be finite");
    if (v_in == 0.0) return 0.0;
    const double is = c.diode.i_s;
    const double nvt = c.diode.n_vt();
    const double r = c.load();
    auto f = [&](double v) { return is * std::expm1((v_in - v) / nvt) - v / r; };
    const double lo = v_in > 0.0 ? 0.0 : -is * r;
    const double hi = v_in > 0.0 ? v_in : 0.0;
    std::uintmax_t iterations = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, f(lo), f(hi), boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 1),
        iterations);
    return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

double harvested_dc_power(const SimTrace& trace)
{
    if (!trace.steady)
        throw SimulationError("rectifier did not reach steady state within " +
                              std::to_string(trace.period_means.size()) + " periods");
    if (trace.v_out.empty()) throw SimulationError("empty trace");
    double sum = 0.0;
    for (double v : trace.v_out) sum += v;
    const double mean = sum / static_cast<double>(trace.v_out.size());
    return mean * mean / trace.r_load;
}

void write_trace_csv(std::ostream& os, const SimTrace& trace, std::size_t decimation)
{
    if (decimation == 0) throw std::invalid_argument("decimation must be at least 1");
    os << "t,v_in,v_out,i_d\n";
    for (std::size_t k = 0; k < trace.t.size(); k += decimation)
        os << format_double(trace.t[k]) << ',' << format_double(trace.v_in[k]) << ','
           << format_double(trace.v_out[k]) << ',' << format_double(trace.i_d[k]) << '\n';
}

}  // namespace wpt
