// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include "wpt/circuit.hpp"
#include "wpt/errors.hpp"
#include "wpt/format.hpp"
#include "wpt/parallel.hpp"
#include "wpt/scaling.hpp"
#include "wpt/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace wpt::cli {

namespace {

struct Design {
    Waveform waveform;
    int iterations = 0;
    bool converged = true;
    std::string seed;

    Design(Waveform w) : waveform(std::move(w)) {}
    Design(Waveform w, int it, bool conv, std::string s)
        : waveform(std::move(w)), iterations(it), converged(conv), seed(std::move(s))
    {
    }
};

Design design_for(const std::string& strategy, const std::vector<ChannelRealization>& h,
                  const ExperimentConfig& cfg, double eta)
{
    const double P = cfg.power_w;
    const auto opts = cfg.optimizer_options();
    const auto& p = cfg.rectenna;
    const ChannelRealization& h0 = h.front();
    auto from_trace = [](SCATrace tr) {
        return Design{std::move(tr.waveform), tr.iterations, tr.converged, tr.seed};
    };
    if (strategy == "opt-multi") return from_trace(optimize_multi(h, cfg.weights(), P, p, opts));
    if (strategy == "ass-multi") return {ass_multi(h, cfg.weights(), P, p)};
    if (strategy == "up") return {up(h0.grid, h0.antennas(), P)};
    if (strategy == "up-matched") return {up_matched(h0, P)};
    if (strategy == "opt") return from_trace(optimize(h0, P, p, opts));
    if (strategy == "opt-decoupled") return from_trace(optimize_decoupled(h0, P, p, opts));
    if (strategy == "opt-papr") return from_trace(optimize_papr(h0, P, eta, p, opts));
    return {design(strategy, h0, P, p, opts, eta)};
}

double max_papr(const Waveform& w, int oversampling)
{
    double worst = 0.0;
    for (std::size_t m = 0; m < w.antennas(); ++m)
        if (w.amplitude.col(static_cast<Eigen::Index>(m)).squaredNorm() > 0.0)
            worst = std::max(worst, papr(w, m, oversampling));
    return worst;
}

struct Moments {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Sums in index order so results do not depend on the worker count.
Moments moments(const std::vector<double>& v)
{
    Moments m;
    if (v.empty()) return m;
    double s = 0.0;
    for (double x : v) s += x;
    m.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double q = 0.0;
        for (double x : v) q += (x - m.mean) * (x - m.mean);
        m.stderr_ = std::sqrt(q / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return m;
}

std::string f(double v) { return format_double(v); }

void require_single_rectenna(const ExperimentConfig& cfg, const char* what)
{
    if (cfg.rectennas != 1)
        throw ConfigError("rectennas", std::string(what) + " supports a single rectenna only");
}

void write_waveform_file(const std::string& path, const Waveform& w, double power)
{
    std::ofstream os(path);
    if (!os) throw ConfigError("waveform_out", "cannot write '" + path + "'");
    write_waveform(os, w, power);
}

}  // namespace

void cmd_optimize(const ExperimentConfig& cfg, std::ostream& out)
{
    cfg.validate();
    const std::size_t combos = cfg.tones.size() * cfg.antennas.size() * cfg.bandwidth_hz.size() * cfg.strategies.size();
    if (!cfg.waveform_out.empty() && combos != 1)
        throw ConfigError("waveform_out", "needs exactly one (tones, antennas, bandwidth_hz, strategy) combination");

    out << "strategy,channel,bandwidth_hz,tones,antennas,rectennas,realization,zdc,papr_max,transmit_power_w,"
           "iterations,converged,seed_strategy\n";
    for (double b : cfg.bandwidth_hz)
        for (std::size_t n : cfg.tones)
            for (std::size_t m : cfg.antennas) {
                const auto h = draw_channels(cfg, cfg.grid(n, b), m, cfg.realization);
                for (const auto& s : cfg.strategies) {
                    const Design d = design_for(s, h, cfg, cfg.papr_eta.front());
                    const double z = weighted_zdc(d.waveform, h, cfg.weights(), cfg.rectenna);
                    out << s << ',' << to_string(cfg.channel) << ',' << f(b) << ',' << n << ',' << m << ','
                        << cfg.rectennas << ',' << cfg.realization << ',' << f(z) << ','
                        << f(max_papr(d.waveform, cfg.papr_oversampling)) << ','
                        << f(d.waveform.transmit_power()) << ',' << d.iterations << ','
                        << (d.converged ? 1 : 0) << ',' << d.seed << '\n';
                    if (!cfg.waveform_out.empty()) write_waveform_file(cfg.waveform_out, d.waveform, cfg.power_w);
                }
            }
}

namespace {

void evaluate_file(const ExperimentConfig& cfg, std::ostream& out)
{
    std::ifstream in(cfg.waveform_in);
    if (!in) throw ConfigError("waveform_in", "cannot open '" + cfg.waveform_in + "'");
    WaveformFile file;
    try {
        file = read_waveform(in);
    } catch (const std::exception& e) {
        throw ConfigError("waveform_in", e.what());
    }
    const Waveform& w = file.waveform;
    const std::size_t trials = cfg.trials;
    out << "realization,tones,antennas,zdc_analytic,zdc_time_average,iout_a,papr_max,transmit_power_w\n";
    for (std::size_t r = 0; r < trials; ++r) {
        const std::size_t index = cfg.realization + r;
        const auto h = draw_channels(cfg, w.grid, w.antennas(), index);
        const double z = zdc_analytic(w, h.front(), cfg.rectenna);
        const double zt = w.grid.commensurate() ? zdc_time_average(w, h.front(), cfg.rectenna) : std::nan("");
        out << index << ',' << w.tones() << ',' << w.antennas() << ',' << f(z) << ',' << f(zt) << ','
            << f(iout_fixed_point(z, cfg.rectenna)) << ',' << f(max_papr(w, cfg.papr_oversampling)) << ','
            << f(w.transmit_power()) << '\n';
    }
}

}  // namespace

void cmd_evaluate(const ExperimentConfig& cfg, std::ostream& out)
{
    cfg.validate();
    if (!cfg.waveform_in.empty()) {
        require_single_rectenna(cfg, "evaluating a waveform file");
        evaluate_file(cfg, out);
        return;
    }
    out << "strategy,channel,bandwidth_hz,tones,antennas,rectennas,trials,zdc_mean,zdc_stderr,papr_mean\n";
    const std::size_t S = cfg.strategies.size();
    for (double b : cfg.bandwidth_hz)
        for (std::size_t n : cfg.tones)
            for (std::size_t m : cfg.antennas) {
                std::vector<std::vector<double>> z(S, std::vector<double>(cfg.trials));
                std::vector<std::vector<double>> pr(S, std::vector<double>(cfg.trials));
                parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
                    const auto h = draw_channels(cfg, cfg.grid(n, b), m, cfg.realization + t);
                    for (std::size_t s = 0; s < S; ++s) {
                        const Design d = design_for(cfg.strategies[s], h, cfg, cfg.papr_eta.front());
                        z[s][t] = weighted_zdc(d.waveform, h, cfg.weights(), cfg.rectenna);
                        pr[s][t] = max_papr(d.waveform, cfg.papr_oversampling);
                    }
                });
                for (std::size_t s = 0; s < S; ++s) {
                    const Moments mz = moments(z[s]);
                    out << cfg.strategies[s] << ',' << to_string(cfg.channel) << ',' << f(b) << ',' << n << ','
                        << m << ',' << cfg.rectennas << ',' << cfg.trials << ',' << f(mz.mean) << ','
                        << f(mz.stderr_) << ',' << f(moments(pr[s]).mean) << '\n';
                }
            }
}

void cmd_papr(const ExperimentConfig& cfg, std::ostream& out)
{
    cfg.validate();
    require_single_rectenna(cfg, "the PAPR sweep");
    if (cfg.papr_eta.empty()) throw ConfigError("papr_eta", "no values");
    out << "eta,channel,bandwidth_hz,tones,antennas,realization,zdc,zdc_unconstrained,papr_max,iterations,"
           "converged,amplitudes\n";
    const auto opts = cfg.optimizer_options();
    for (double b : cfg.bandwidth_hz)
        for (std::size_t n : cfg.tones)
            for (std::size_t m : cfg.antennas) {
                const auto h = draw_channels(cfg, cfg.grid(n, b), m, cfg.realization);
                const double z_free = optimize(h.front(), cfg.power_w, cfg.rectenna, opts).final_zdc();
                for (double eta : cfg.papr_eta) {
                    const SCATrace tr = optimize_papr(h.front(), cfg.power_w, eta, cfg.rectenna, opts);
                    std::string amps;
                    for (Eigen::Index i = 0; i < tr.waveform.amplitude.rows(); ++i)
                        for (Eigen::Index j = 0; j < tr.waveform.amplitude.cols(); ++j) {
                            if (!amps.empty()) amps += ' ';
                            amps += f(tr.waveform.amplitude(i, j));
                        }
                    out << f(eta) << ',' << to_string(cfg.channel) << ',' << f(b) << ',' << n << ',' << m << ','
                        << cfg.realization << ',' << f(zdc_analytic(tr.waveform, h.front(), cfg.rectenna)) << ','
                        << f(z_free) << ',' << f(max_papr(tr.waveform, cfg.papr_oversampling)) << ','
                        << tr.iterations << ',' << (tr.converged ? 1 : 0) << ',' << amps << '\n';
                }
            }
}

void cmd_scaling(const ExperimentConfig& cfg, std::ostream& out)
{
    cfg.validate();
    if (cfg.channel == ChannelKind::multipath)
        throw ConfigError("channel", "scaling laws are stated for flat or selective channels");
    if (cfg.trials < 100) throw ConfigError("trials", "Monte Carlo needs at least 100 trials");
    if (cfg.rectenna.order != 4) throw ConfigError("taylor_order", "scaling laws use the fourth-order model");
    const scaling::Regime regime =
        cfg.channel == ChannelKind::flat ? scaling::Regime::flat : scaling::Regime::selective;

    std::vector<scaling::Strategy> strategies;
    for (const auto& s : cfg.strategies) {
        try {
            strategies.push_back(scaling::parse_strategy(s));
        } catch (const std::invalid_argument&) {
            throw ConfigError("strategies", "'" + s + "' has no scaling law (use ss, up, ass or upmf)");
        }
    }
    scaling::write_csv_header(out);
    for (auto strategy : strategies)
        for (std::size_t n : cfg.tones)
            for (std::size_t m : cfg.antennas) {
                scaling::Scenario sc;
                sc.strategy = strategy;
                sc.regime = regime;
                sc.tones = n;
                sc.antennas = m;
                sc.rectennas = cfg.rectennas;
                sc.power = cfg.power_w;
                sc.params = cfg.rectenna;
                try {
                    sc.validate();
                } catch (const std::invalid_argument& e) {
                    throw ConfigError("strategies", e.what());
                }
                const auto cf = scaling::closed_form(sc);
                const auto mc = scaling::monte_carlo(sc, cfg.trials, cfg.seed, cfg.workers);
                scaling::write_csv_row(out, sc, cf, mc);
            }
}

void cmd_simulate(const ExperimentConfig& cfg, std::ostream& out)
{
    cfg.validate();
    require_single_rectenna(cfg, "circuit simulation");
    SimOptions sim;
    sim.step_scale = cfg.sim_step_scale;
    sim.steady_tol = cfg.sim_steady_tol;
    sim.max_periods = cfg.sim_max_periods;

    std::ofstream trace;
    if (!cfg.trace_out.empty()) {
        trace.open(cfg.trace_out);
        if (!trace) throw ConfigError("trace_out", "cannot write '" + cfg.trace_out + "'");
        trace << "strategy,bandwidth_hz,tones,antennas,t_s,v_in_v,v_out_v,i_d_a\n";
    }

    out << "strategy,channel,bandwidth_hz,tones,antennas,c_out_f,trials,pdc_mean_w,pdc_stderr_w,vout_mean_v,"
           "zdc_mean\n";
    const std::size_t S = cfg.strategies.size();
    for (double b : cfg.bandwidth_hz)
        for (std::size_t n : cfg.tones)
            for (std::size_t m : cfg.antennas) {
                const CircuitParams circuit = cfg.circuit(cfg.grid(n, b));
                std::vector<std::vector<double>> pdc(S, std::vector<double>(cfg.trials));
                std::vector<std::vector<double>> vout(S, std::vector<double>(cfg.trials));
                std::vector<std::vector<double>> z(S, std::vector<double>(cfg.trials));
                std::vector<SimTrace> first(S);
                parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
                    const auto h = draw_channels(cfg, cfg.grid(n, b), m, cfg.realization + t);
                    for (std::size_t s = 0; s < S; ++s) {
                        const Design d = design_for(cfg.strategies[s], h, cfg, cfg.papr_eta.front());
                        SimTrace tr = simulate(d.waveform, h.front(), circuit, sim);
                        pdc[s][t] = harvested_dc_power(tr);
                        vout[s][t] = tr.final_mean();
                        z[s][t] = zdc_analytic(d.waveform, h.front(), cfg.rectenna);
                        if (t == 0 && trace.is_open()) first[s] = std::move(tr);
                    }
                });
                for (std::size_t s = 0; s < S; ++s) {
                    const Moments mp = moments(pdc[s]);
                    out << cfg.strategies[s] << ',' << to_string(cfg.channel) << ',' << f(b) << ',' << n << ','
                        << m << ',' << f(circuit.c_out) << ',' << cfg.trials << ',' << f(mp.mean) << ','
                        << f(mp.stderr_) << ',' << f(moments(vout[s]).mean) << ',' << f(moments(z[s]).mean)
                        << '\n';
                    if (trace.is_open()) {
                        const SimTrace& tr = first[s];
                        for (std::size_t k = 0; k < tr.t.size(); k += cfg.trace_decimation)
                            trace << cfg.strategies[s] << ',' << f(b) << ',' << n << ',' << m << ',' << f(tr.t[k])
                                  << ',' << f(tr.v_in[k]) << ',' << f(tr.v_out[k]) << ',' << f(tr.i_d[k]) << '\n';
                    }
                }
            }
}

int report_failure(std::ostream& err)
{
    try {
        throw;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return exit_solver;
    } catch (const SimulationError& e) {
        err << "simulation did not converge: " << e.what() << '\n';
        return exit_simulation;
    } catch (const std::invalid_argument& e) {
        err << "error: invalid configuration: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace wpt::cli
