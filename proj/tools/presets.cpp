// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale experiment presets. Each one fixes a configuration and a command;
// user overrides are applied on top of the defaults before running.

#include "commands.hpp"

#include "wpt/circuit.hpp"
#include "wpt/format.hpp"
#include "wpt/scaling.hpp"

#include <cmath>
#include <ostream>

namespace wpt::cli {

namespace {

std::string f(double v) { return format_double(v); }

ChannelRealization two_tone_channel(double a0, double a1)
{
    Eigen::MatrixXcd r(2, 1);
    r << a0, a1;
    return {r, FrequencyGrid::commensurate_grid(2, 1e5)};
}

void fig2_defaults(ExperimentConfig& c)
{
    c.channel = ChannelKind::flat;
    c.tones = {2};
    c.power_w = 1e-4;
}

// A0 = 1 and A1 swept over [0.5, 1.5]: the two single-tone allocations, the
// best stationary point, and the iterative design.
void fig2_run(const ExperimentConfig& c, std::ostream& out)
{
    out << "a1,zdc_tone0,zdc_tone1,zdc_best,s0_sq,s1_sq,interior,zdc_sca\n";
    const double P = c.power_w;
    for (int i = 0; i <= 100; ++i) {
        const double a1 = 0.5 + 0.01 * i;
        const ChannelRealization h = two_tone_channel(1.0, a1);
        Eigen::MatrixXd s0(2, 1), s1(2, 1);
        s0 << std::sqrt(2.0 * P), 0.0;
        s1 << 0.0, std::sqrt(2.0 * P);
        const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 1);
        const double z0 = zdc_analytic(Waveform(s0, zero, h.grid), h, c.rectenna);
        const double z1 = zdc_analytic(Waveform(s1, zero, h.grid), h, c.rectenna);
        const ToyResult toy = toy_n2(1.0, a1, P, c.rectenna);
        const double z_sca = optimize(h, P, c.rectenna, c.optimizer_options()).final_zdc();
        out << f(a1) << ',' << f(z0) << ',' << f(z1) << ',' << f(toy.zdc) << ',' << f(toy.s0_sq) << ','
            << f(toy.s1_sq) << ',' << (toy.interior ? 1 : 0) << ',' << f(z_sca) << '\n';
    }
}

void fig3_top_defaults(ExperimentConfig& c)
{
    c.channel = ChannelKind::flat;
    c.tones.clear();
    for (std::size_t n = 1; n <= 16; ++n) c.tones.push_back(n);
}

void fig3_top_run(const ExperimentConfig& c, std::ostream& out)
{
    out << "tones,zdc_up,zdc_opt,opt_over_up\n";
    for (std::size_t n : c.tones) {
        const FrequencyGrid g = c.grid(n, c.bandwidth_hz.front());
        const ChannelRealization h = flat_channel(c.channel_amplitude, c.channel_phase_rad, g, 1);
        const double zu = zdc_analytic(up(g, 1, c.power_w), h, c.rectenna);
        const double zo = optimize(h, c.power_w, c.rectenna, c.optimizer_options()).final_zdc();
        out << n << ',' << f(zu) << ',' << f(zo) << ',' << f(zo / zu) << '\n';
    }
}

void fig3_papr_defaults(ExperimentConfig& c)
{
    c.channel = ChannelKind::flat;
    c.tones = {8};
    c.papr_eta = {1e6, 12.0, 8.0, 4.0, 2.0};
}

void average_defaults(ExperimentConfig& c, double bandwidth)
{
    c.channel = ChannelKind::multipath;
    c.bandwidth_hz = {bandwidth};
    c.tones = {1, 2, 4, 8, 16};
    c.antennas = {1, 4};
    c.strategies = {"up", "ass", "mf", "opt"};
    c.trials = 10;
}

void fig4_defaults(ExperimentConfig& c) { average_defaults(c, 1e6); }
void fig5_defaults(ExperimentConfig& c) { average_defaults(c, 10e6); }

void fig6_defaults(ExperimentConfig& c)
{
    c.channel = ChannelKind::multipath;
    c.tones = {16};
    c.antennas = {1};
    c.bandwidth_hz = {1e6, 2.5e6, 5e6, 10e6, 20e6};
    c.strategies = {"up", "up-matched", "ass", "mf", "maxpapr", "opt"};
    c.trials = 10;
}

void scalinglaws_defaults(ExperimentConfig& c)
{
    c.channel = ChannelKind::selective;
    c.tones = {1, 2, 4, 8, 16, 32, 64};
    c.antennas = {1};
    c.strategies = {"ass", "upmf"};
    c.trials = 2000;
}

// One row per implemented closed form.
void table1_run(const ExperimentConfig& c, std::ostream& out)
{
    using scaling::Regime;
    using scaling::Strategy;
    struct Row {
        Strategy s;
        Regime r;
        std::size_t n, m, u;
    };
    const std::vector<Row> rows{
        {Strategy::ss, Regime::flat, 1, 1, 1},        {Strategy::ss, Regime::selective, 1, 1, 1},
        {Strategy::ss, Regime::flat, 1, 4, 1},        {Strategy::up, Regime::flat, 2, 1, 1},
        {Strategy::up, Regime::flat, 8, 1, 1},        {Strategy::up, Regime::flat, 32, 1, 1},
        {Strategy::up, Regime::selective, 2, 1, 1},   {Strategy::up, Regime::selective, 8, 1, 1},
        {Strategy::up, Regime::selective, 32, 1, 1},  {Strategy::up, Regime::flat, 8, 1, 3},
        {Strategy::ass, Regime::flat, 8, 1, 1},       {Strategy::ass, Regime::selective, 2, 1, 1},
        {Strategy::ass, Regime::selective, 8, 1, 1},  {Strategy::ass, Regime::selective, 32, 1, 1},
        {Strategy::upmf, Regime::flat, 4, 2, 1},      {Strategy::upmf, Regime::flat, 8, 4, 1},
        {Strategy::upmf, Regime::selective, 8, 1, 1}, {Strategy::upmf, Regime::selective, 8, 4, 1},
    };
    if (c.trials < 100) throw ConfigError("trials", "Monte Carlo needs at least 100 trials");
    scaling::write_csv_header(out);
    for (const Row& row : rows) {
        scaling::Scenario sc;
        sc.strategy = row.s;
        sc.regime = row.r;
        sc.tones = row.n;
        sc.antennas = row.m;
        sc.rectennas = row.u;
        sc.power = c.power_w;
        sc.params = c.rectenna;
        scaling::write_csv_row(out, sc, scaling::closed_form(sc), scaling::monte_carlo(sc, c.trials, c.seed, c.workers));
    }
}

void table1_defaults(ExperimentConfig& c)
{
    c.channel = ChannelKind::selective;
    c.trials = 10000;
}

void fig9_defaults(ExperimentConfig& c)
{
    c.channel = ChannelKind::multipath;
    c.bandwidth_hz = {10e6};
    c.tones = {1, 2, 4, 8, 16};
    c.antennas = {1};
    c.strategies = {"up", "ass", "mf", "opt"};
    c.c_out_auto = true;
    c.trials = 5;
}

void fig8_defaults(ExperimentConfig& c)
{
    c.channel = ChannelKind::multipath;
    c.bandwidth_hz = {10e6};
    c.tones = {16};
    c.antennas = {1};
    c.strategies = {"opt", "up"};
    c.c_out_f = 10e-12;
    c.trace_decimation = 400;
}

// Final simulated period of one realization per strategy.
void fig8_run(const ExperimentConfig& c, std::ostream& out)
{
    if (c.rectennas != 1) throw ConfigError("rectennas", "traces are for a single rectenna");
    SimOptions sim;
    sim.step_scale = c.sim_step_scale;
    sim.steady_tol = c.sim_steady_tol;
    sim.max_periods = c.sim_max_periods;
    out << "strategy,t_s,v_in_v,v_out_v,i_d_a\n";
    const std::size_t n = c.tones.front();
    const auto h = draw_channels(c, c.grid(n, c.bandwidth_hz.front()), c.antennas.front(), c.realization);
    for (const auto& s : c.strategies) {
        const Waveform w = design(s, h.front(), c.power_w, c.rectenna, c.optimizer_options(), c.papr_eta.front());
        const SimTrace tr = simulate(w, h.front(), c.circuit(h.front().grid), sim);
        harvested_dc_power(tr);  // throws when the run did not settle
        for (std::size_t k = 0; k < tr.t.size(); k += c.trace_decimation)
            out << s << ',' << f(tr.t[k]) << ',' << f(tr.v_in[k]) << ',' << f(tr.v_out[k]) << ',' << f(tr.i_d[k])
                << '\n';
    }
}

void hardening_defaults(ExperimentConfig& c)
{
    c.channel = ChannelKind::selective;
    c.tones = {4};
    c.antennas = {1, 2, 4, 8, 16, 32, 64};
    c.trials = 500;
}

void hardening_run(const ExperimentConfig& c, std::ostream& out)
{
    out << "antennas,norm_deviation,zdc_deviation,zdc_hardened\n";
    for (const auto& row : scaling::hardening_curve(c.antennas, c.tones.front(), c.power_w, c.seed, c.trials, c.rectenna))
        out << row.antennas << ',' << f(row.norm_deviation) << ',' << f(row.zdc_deviation) << ','
            << f(row.zdc_hardened) << '\n';
}

}  // namespace

const std::vector<Preset>& presets()
{
    static const std::vector<Preset> list{
        {"fig2", "# parallels Fig. 2 (two-tone z_DC versus A1 with A0 = 1, P = 1e-4 W)",
         "two-tone sweep: single-tone allocations, best stationary point, iterative design", fig2_defaults,
         fig2_run},
        {"fig3-top", "# parallels Fig. 3 top (z_DC versus N, flat channel, OPT and UP)",
         "OPT against UP for N = 1..16 without a channel", fig3_top_defaults, fig3_top_run},
        {"fig3-papr", "# parallels Fig. 3 middle and bottom (z_DC and amplitudes versus PAPR bound, N = 8)",
         "PAPR-constrained design for a sweep of bounds", fig3_papr_defaults, cmd_papr},
        {"fig4", "# parallels Fig. 4 (average z_DC versus (N, M), B = 1 MHz)",
         "ensemble z_DC of UP, ASS, MF and OPT over multipath channels", fig4_defaults, cmd_evaluate},
        {"fig5", "# parallels Fig. 5 (average z_DC versus (N, M), B = 10 MHz)",
         "ensemble z_DC of UP, ASS, MF and OPT over multipath channels", fig5_defaults, cmd_evaluate},
        {"fig6", "# parallels Fig. 6 (average z_DC versus bandwidth, N = 16, M = 1)",
         "bandwidth sweep including the receive-side maximum-PAPR design", fig6_defaults, cmd_evaluate},
        {"fig-scalinglaws", "# parallels the large-N scaling figure (ASS versus UPMF over selective channels)",
         "closed forms and Monte Carlo for N up to 64", scalinglaws_defaults, cmd_scaling},
        {"table1", "# parallels Table I (scaling laws)", "every implemented closed form against Monte Carlo",
         table1_defaults, table1_run},
        {"fig8-trace", "# parallels Fig. 8 (v_in and v_out over one envelope period, N = 16, B = 10 MHz)",
         "rectifier traces for OPT and UP on one realization", fig8_defaults, fig8_run},
        {"fig9-like", "# parallels Figs. 9-10 (average harvested DC power versus N, B = 10 MHz)",
         "circuit-simulated ensemble P_DC of UP, ASS, MF and OPT", fig9_defaults, cmd_simulate},
        {"hardening", "# parallels Table I UPMF rows (channel hardening as M grows)",
         "median deviation of ||h_n|| / sqrt(M) and of UPMF z_DC from the hardened value", hardening_defaults,
         hardening_run},
    };
    return list;
}

const Preset& find_preset(const std::string& name)
{
    for (const auto& p : presets())
        if (p.name == name) return p;
    std::string known;
    for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
    throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
}

}  // namespace wpt::cli
