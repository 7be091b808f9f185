// SPDX-License-Identifier: Apache-2.0

#include "wpt/scaling.hpp"

#include "wpt/channel.hpp"
#include "wpt/format.hpp"
#include "wpt/optimizer.hpp"
#include "wpt/parallel.hpp"
#include "wpt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wpt::scaling {

std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::ss: return "ss";
    case Strategy::up: return "up";
    case Strategy::ass: return "ass";
    case Strategy::upmf: return "upmf";
    }
    return "?";
}

std::string_view to_string(Regime r)
{
    return r == Regime::flat ? "flat" : "selective";
}

Strategy parse_strategy(std::string_view s)
{
    if (s == "ss") return Strategy::ss;
    if (s == "up") return Strategy::up;
    if (s == "ass") return Strategy::ass;
    if (s == "upmf") return Strategy::upmf;
    throw std::invalid_argument("unknown scaling strategy '" + std::string(s) + "'");
}

Regime parse_regime(std::string_view s)
{
    if (s == "flat") return Regime::flat;
    if (s == "selective") return Regime::selective;
    throw std::invalid_argument("unknown channel regime '" + std::string(s) + "'");
}

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v)
    {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            carry += (sum - t) + v;
        else
            carry += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

}  // namespace

void Scenario::validate() const
{
    params.validate();
    if (params.order != 4) throw std::invalid_argument("scaling laws are stated for the fourth-order model");
    if (tones < 1 || antennas < 1 || rectennas < 1)
        throw std::invalid_argument("tones, antennas and rectennas must be at least 1");
    if (!(power > 0.0)) throw std::invalid_argument("power must be positive");
    if (strategy == Strategy::ss && tones != 1)
        throw std::invalid_argument("single sinewave scenario needs exactly one tone");
    if (rectennas > 1 && strategy != Strategy::up)
        throw std::invalid_argument("multi-rectenna closed form exists for UP only");
    if (strategy == Strategy::ass && regime == Regime::selective && antennas != 1)
        throw std::invalid_argument("ASS over selective channels has a closed form for one antenna only");
}

double harmonic_H(std::size_t n)
{
    CompensatedSum h;
    for (std::size_t k = 1; k <= n; ++k) h.add(1.0 / static_cast<double>(k));
    return h.value();
}

double harmonic_S(std::size_t n)
{
    CompensatedSum h;
    CompensatedSum s;
    for (std::size_t k = 1; k <= n; ++k) {
        h.add(1.0 / static_cast<double>(k));
        s.add(h.value() / static_cast<double>(k));
    }
    return s.value();
}

namespace {

double alternating(std::size_t n, int power)
{
    if (n == 0) return 0.0;
    double sum = 0.0;
    double binom = 1.0;  // C(n-1, k)
    for (std::size_t k = 0; k < n; ++k) {
        const double sign = ((k + n - 1) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binom / std::pow(static_cast<double>(n - k), power);
        binom = binom * static_cast<double>(n - 1 - k) / static_cast<double>(k + 1);
    }
    return static_cast<double>(n) * sum;
}

double tuple_count(std::size_t n)
{
    const auto d = static_cast<double>(n);
    return d * (2.0 * d * d + 1.0) / 3.0;
}

}  // namespace

double harmonic_H_alternating(std::size_t n)
{
    return alternating(n, 2);
}

double harmonic_S_alternating(std::size_t n)
{
    return alternating(n, 3);
}

Interval closed_form(const Scenario& sc)
{
    sc.validate();
    const std::vector<double> k = sc.params.k();
    const double r = sc.params.diode.r_ant;
    const double a2 = k[0] * r * sc.power;              // k2 R P
    const double a4 = k[1] * r * r * sc.power * sc.power;  // k4 R^2 P^2
    const auto n = static_cast<double>(sc.tones);
    const auto m = static_cast<double>(sc.antennas);
    const double flat_ratio = (2.0 * n * n + 1.0) / (2.0 * n);

    auto exact = [](double v) { return Interval{v, v}; };
    switch (sc.strategy) {
    case Strategy::ss:
        // Matched beam on one tone: ||h||^2 ~ Gamma(M, 1).
        return exact(a2 * m + 1.5 * a4 * m * (m + 1.0));
    case Strategy::up: {
        const double z = sc.regime == Regime::flat ? a2 + 2.0 * a4 * flat_ratio : a2 + 3.0 * a4;
        return exact(static_cast<double>(sc.rectennas) * z);
    }
    case Strategy::ass:
        if (sc.regime == Regime::flat) return exact(a2 * m + 1.5 * a4 * m * (m + 1.0));
        return exact(a2 * harmonic_H(sc.tones) + 3.0 * a4 * harmonic_S(sc.tones));
    case Strategy::upmf:
        if (sc.regime == Regime::flat) return exact(a2 * m + a4 * flat_ratio * m * (m + 1.0));
        {
            const double mean_norm = std::exp(std::lgamma(m + 0.5) - std::lgamma(m));
            const double count = tuple_count(sc.tones);
            const double scale = 1.5 * a4 / (n * n);
            return {a2 * m + scale * std::pow(mean_norm, 4) * count, a2 * m + scale * m * (m + 1.0) * count};
        }
    }
    throw std::logic_error("unhandled scaling strategy");
}

double asymptotic(const Scenario& sc)
{
    sc.validate();
    const std::vector<double> k = sc.params.k();
    const double r = sc.params.diode.r_ant;
    const double a2 = k[0] * r * sc.power;
    const double a4 = k[1] * r * r * sc.power * sc.power;
    const auto n = static_cast<double>(sc.tones);
    const auto m = static_cast<double>(sc.antennas);
    switch (sc.strategy) {
    case Strategy::ss: return a2 + 3.0 * a4;
    case Strategy::up:
        return static_cast<double>(sc.rectennas) *
               (sc.regime == Regime::flat ? a2 + 2.0 * a4 * n : a2 + 3.0 * a4);
    case Strategy::ass:
        if (sc.regime == Regime::flat) return a2 + 3.0 * a4;
        return a2 * std::log(n) + 1.5 * a4 * std::log(n) * std::log(n);
    case Strategy::upmf:
        if (m > 1.0) return a2 * m + a4 * n * m * m;
        return sc.regime == Regime::flat ? a2 + 2.0 * a4 * n
                                         : a2 + (std::numbers::pi * std::numbers::pi / 16.0) * a4 * n;
    }
    throw std::logic_error("unhandled scaling strategy");
}

namespace {

std::vector<ChannelRealization> draw_channels(const Scenario& sc, const FrequencyGrid& grid,
                                              std::uint64_t seed, std::uint64_t trial)
{
    const auto tones = static_cast<Eigen::Index>(sc.tones);
    const auto antennas = static_cast<Eigen::Index>(sc.antennas);
    std::vector<ChannelRealization> out;
    if (sc.regime == Regime::selective) return iid_frequency_channel(grid, sc.antennas, sc.rectennas, seed, trial);
    static const PowerDelayProfile profile = PowerDelayProfile::exponential();
    for (std::size_t u = 0; u < sc.rectennas; ++u) {
        Eigen::MatrixXcd h(tones, antennas);
        for (Eigen::Index m = 0; m < antennas; ++m) {
            const std::uint64_t index = (trial * sc.rectennas + u) * sc.antennas + static_cast<std::uint64_t>(m);
            std::complex<double> g = 0.0;
            for (const auto& tap : generate_taps(profile, seed, index)) g += tap.gain;
            h.col(m).setConstant(g);
        }
        out.push_back({h, grid});
    }
    return out;
}

Waveform strategy_waveform(const Scenario& sc, const ChannelRealization& h)
{
    switch (sc.strategy) {
    case Strategy::ss: return ss(h, sc.power);
    case Strategy::up: return up(h.grid, sc.antennas, sc.power);
    case Strategy::ass: return ass(h, sc.power);
    case Strategy::upmf: return upmf(h, sc.power);
    }
    throw std::logic_error("unhandled scaling strategy");
}

}  // namespace

MonteCarloResult monte_carlo(const Scenario& sc, std::size_t trials, std::uint64_t seed, std::size_t workers)
{
    sc.validate();
    if (trials < 100) throw std::invalid_argument("Monte Carlo needs at least 100 trials");
    const FrequencyGrid grid = FrequencyGrid::commensurate_grid(sc.tones, 1e5);

    // Fixed block partition keeps the reduction order independent of workers.
    const std::size_t blocks = std::min<std::size_t>(256, trials);
    std::vector<CompensatedSum> sums(blocks), squares(blocks);
    parallel_for(blocks, workers, [&](std::size_t b) {
        const std::size_t begin = b * trials / blocks;
        const std::size_t end = (b + 1) * trials / blocks;
        for (std::size_t t = begin; t < end; ++t) {
            const std::vector<ChannelRealization> h = draw_channels(sc, grid, seed, t);
            const Waveform w = strategy_waveform(sc, h.front());
            double z = 0.0;
            for (const auto& hu : h) z += zdc_analytic(w, hu, sc.params);
            sums[b].add(z);
            squares[b].add(z * z);
        }
    });
    CompensatedSum total, total_sq;
    for (std::size_t b = 0; b < blocks; ++b) {
        total.add(sums[b].value());
        total_sq.add(squares[b].value());
    }
    const auto n = static_cast<double>(trials);
    MonteCarloResult res;
    res.trials = trials;
    res.mean = total.value() / n;
    const double var = std::max(0.0, (total_sq.value() - n * res.mean * res.mean) / (n - 1.0));
    res.stderr_ = std::sqrt(var / n);
    return res;
}

std::vector<HardeningRow> hardening_curve(const std::vector<std::size_t>& antenna_counts, std::size_t tones,
                                          double power, std::uint64_t seed, std::size_t trials,
                                          const RectennaParams& params)
{
    if (trials < 1) throw std::invalid_argument("hardening curve needs at least one trial");
    if (tones < 1) throw std::invalid_argument("hardening curve needs at least one tone");
    for (std::size_t i = 1; i < antenna_counts.size(); ++i)
        if (antenna_counts[i] <= antenna_counts[i - 1])
            throw std::invalid_argument("antenna counts must be strictly ascending");
    const FrequencyGrid grid = FrequencyGrid::commensurate_grid(tones, 1e5);
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };
    std::vector<HardeningRow> rows;
    for (std::size_t m : antenna_counts) {
        if (m < 1) throw std::invalid_argument("antenna counts must be positive");
        const auto md = static_cast<double>(m);
        Eigen::MatrixXcd hardened = Eigen::MatrixXcd::Constant(static_cast<Eigen::Index>(tones), 1, std::sqrt(md));
        const double z_hard = zdc_analytic(upmf({hardened, grid}, power), {hardened, grid}, params);
        std::vector<double> norm_dev, z_dev;
        for (std::size_t t = 0; t < trials; ++t) {
            const ChannelRealization h = iid_frequency_channel(grid, m, 1, seed ^ (0x9e37ULL * m), t).front();
            const Eigen::VectorXd norms = h.tone_norms();
            for (Eigen::Index n = 0; n < norms.size(); ++n) norm_dev.push_back(std::abs(norms[n] / std::sqrt(md) - 1.0));
            z_dev.push_back(std::abs(zdc_analytic(upmf(h, power), h, params) / z_hard - 1.0));
        }
        rows.push_back({m, median(norm_dev), median(z_dev), z_hard});
    }
    return rows;
}

void write_csv_header(std::ostream& os)
{
    os << "strategy,regime,tones,antennas,rectennas,power_w,closed_form,closed_form_upper,mc_mean,mc_stderr\n";
}

void write_csv_row(std::ostream& os, const Scenario& sc, const Interval& cf, const MonteCarloResult& mc)
{
    os << to_string(sc.strategy) << ',' << to_string(sc.regime) << ',' << sc.tones << ',' << sc.antennas << ','
       << sc.rectennas << ',' << format_double(sc.power) << ',' << format_double(cf.lower) << ','
       << format_double(cf.upper) << ',' << format_double(mc.mean) << ',' << format_double(mc.stderr_) << '\n';
}

}  // namespace wpt::scaling
