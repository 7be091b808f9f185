// SPDX-License-Identifier: Apache-2.0

#include "wpt/optimizer.hpp"

#include "wpt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wpt {

void OptimizerOptions::validate() const
{
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
    if (oversampling < 2) throw std::invalid_argument("PAPR oversampling must be at least 2");
    if (!(floor_ratio > 0.0) || floor_ratio >= 1e-3)
        throw std::invalid_argument("amplitude floor ratio must lie in (0, 1e-3)");
    if (!(kkt_tol > 0.0)) throw std::invalid_argument("kkt_tol must be positive");
}

Eigen::MatrixXd optimal_phases(const ChannelRealization& h)
{
    return -h.phases();
}

namespace {

void check_power(double power)
{
    if (!(power > 0.0) || !std::isfinite(power)) throw std::invalid_argument("power budget must be positive");
}

// Index of the largest value; near-ties (1e-12 relative) resolve to the lowest index.
std::size_t argmax_lowest(const Eigen::VectorXd& v)
{
    const double best = v.maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] >= best - 1e-12 * std::abs(best)) return static_cast<std::size_t>(i);
    return 0;
}

// Single-tone matched beam on tone n with total power P.
Waveform single_tone(const ChannelRealization& h, std::size_t n, double power)
{
    const auto ni = static_cast<Eigen::Index>(n);
    const double norm = h.response.row(ni).norm();
    if (!(norm > 0.0)) throw std::invalid_argument("channel is zero on the selected tone");
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(h.response.rows(), h.response.cols());
    s.row(ni) = std::sqrt(2.0 * power) * h.response.row(ni).cwiseAbs() / norm;
    return Waveform(s, optimal_phases(h), h.grid);
}

Waveform from_vector(const Eigen::VectorXd& x, const Eigen::MatrixXd& phases, const FrequencyGrid& grid)
{
    return Waveform(unflatten_amplitudes(x, static_cast<std::size_t>(phases.rows()),
                                         static_cast<std::size_t>(phases.cols())),
                    phases, grid);
}

Eigen::VectorXd floored(const Eigen::MatrixXd& s, double floor)
{
    return flatten_amplitudes(s).cwiseMax(floor);
}

struct Seed {
    std::string name;
    Eigen::MatrixXd amplitude;
};

struct LoopResult {
    Eigen::VectorXd x;
    std::vector<double> z;
    bool converged = false;
    int iterations = 0;
};

double kkt_of(const gp::Posynomial& f, const Eigen::VectorXd& x, double floor)
{
    return kkt_residual(f, x, floor);
}

// Newton iteration on the log-domain KKT system of max log f s.t.
// log(0.5 ||x||^2 / P) = 0, over the coordinates carrying non-negligible
// power. Only steps that do not lower f are taken.
void newton_polish(const gp::Posynomial& f, Eigen::VectorXd& x, double power, double floor,
                   const OptimizerOptions& opts, LoopResult& r)
{
    const auto nv = x.size();
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> e(
        f.exponent_data(), static_cast<Eigen::Index>(f.size()), nv);
    double z = f.evaluate(x);
    double kkt = kkt_of(f, x, floor);
    for (int it = 0; it < 50 && kkt > 1e-2 * opts.kkt_tol; ++it) {
        const Eigen::VectorXd u = x.array().log().matrix();
        const Eigen::VectorXd l = f.term_log_values(u);
        const double peak = l.maxCoeff();
        Eigen::VectorXd gamma = (l.array() - peak).exp().matrix();
        gamma /= gamma.sum();
        const Eigen::VectorXd a = f.weighted_exponents(gamma);
        const double total = x.squaredNorm();
        const Eigen::VectorXd b = 2.0 * x.array().square().matrix() / total;
        const double c = std::log(0.5 * total / power);

        std::vector<Eigen::Index> act;
        for (Eigen::Index j = 0; j < nv; ++j)
            if (b[j] > 1e-14) act.push_back(j);
        const auto na = static_cast<Eigen::Index>(act.size());
        if (na == 0) break;
        double num = 0.0, den = 0.0;
        for (Eigen::Index i : act) {
            num += a[i] * b[i];
            den += b[i] * b[i];
        }
        const double nu = num / den;
        const Eigen::MatrixXd hf = e.transpose() * gamma.asDiagonal() * e - a * a.transpose();
        const Eigen::MatrixXd hc = Eigen::MatrixXd(2.0 * b.asDiagonal()) - b * b.transpose();
        Eigen::MatrixXd kkt_mat = Eigen::MatrixXd::Zero(na + 1, na + 1);
        Eigen::VectorXd rhs(na + 1);
        for (Eigen::Index i = 0; i < na; ++i) {
            for (Eigen::Index j = 0; j < na; ++j)
                kkt_mat(i, j) = hf(act[i], act[j]) - nu * hc(act[i], act[j]);
            kkt_mat(i, na) = -b[act[i]];
            kkt_mat(na, i) = b[act[i]];
            rhs[i] = -(a[act[i]] - nu * b[act[i]]);
        }
        rhs[na] = -c;
        const Eigen::VectorXd step = kkt_mat.fullPivLu().solve(rhs);
        if (!step.allFinite()) break;

        bool accepted = false;
        double alpha = 1.0;
        for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
            Eigen::VectorXd trial = x;
            for (Eigen::Index i = 0; i < na; ++i)
                trial[act[i]] = std::max(floor, x[act[i]] * std::exp(alpha * step[i]));
            trial *= std::sqrt(power / (0.5 * trial.squaredNorm()));
            trial = trial.cwiseMax(floor);
            const double zt = f.evaluate(trial);
            if (zt < z * (1.0 - 4e-16)) continue;
            const double kt = kkt_of(f, trial, floor);
            if (zt > z || kt < kkt) {
                x = trial;
                z = std::max(z, zt);
                kkt = kt;
                r.z.push_back(zt >= r.z.back() ? zt : r.z.back());
                ++r.iterations;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
}

// Condense-and-maximize loop for max f s.t. 0.5 ||x||^2 <= P: every inner GP
// has the closed-form solution of maximize_monomial_under_power. A Newton
// polish on the KKT system finishes slowly converging runs.
LoopResult fast_loop(const gp::Posynomial& f, Eigen::VectorXd x, double power, double floor,
                     const OptimizerOptions& opts)
{
    LoopResult r;
    double z = f.evaluate(x);
    r.z.push_back(z);
    bool small_change = false;
    for (int i = 0; i < opts.max_iterations; ++i) {
        const gp::Monomial mono = gp::condense(f, x);
        const Eigen::VectorXd next = gp::maximize_monomial_under_power(mono, power, floor);
        const double zn = f.evaluate(next);
        if (zn < z) {
            // Rounding level non-ascent: the current point is a fixed point.
            small_change = true;
            break;
        }
        x = next;
        r.z.push_back(zn);
        r.iterations = i + 1;
        const double rel = (zn - z) / z;
        z = zn;
        if (rel < opts.epsilon) {
            small_change = true;
            if (kkt_of(f, x, floor) <= opts.kkt_tol) break;
        }
    }
    if (kkt_of(f, x, floor) > opts.kkt_tol) newton_polish(f, x, power, floor, opts, r);
    r.converged = small_change || kkt_of(f, x, floor) <= opts.kkt_tol;
    r.x = x;
    return r;
}

// Runs the fast loop from every seed (or the best one) and returns the best
// final point; raw seeds are candidates too, so no baseline can beat the result.
SCATrace multi_start(const gp::Posynomial& f, const std::vector<Seed>& seeds, const Eigen::MatrixXd& phases,
                     const FrequencyGrid& grid, double power, const OptimizerOptions& opts,
                     const std::function<double(const Waveform&)>& score)
{
    const double floor = opts.floor_ratio * std::sqrt(2.0 * power);
    std::vector<std::size_t> order;
    if (opts.multi_start) {
        for (std::size_t i = 0; i < seeds.size(); ++i) order.push_back(i);
    } else {
        std::size_t best = 0;
        double best_z = -1.0;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            const double z = f.evaluate(floored(seeds[i].amplitude, floor));
            if (z > best_z) {
                best_z = z;
                best = i;
            }
        }
        order.push_back(best);
    }

    SCATrace best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
        const Seed& seed = seeds[i];
        const Waveform raw(seed.amplitude, phases, grid);
        const double raw_score = score(raw);
        LoopResult r = fast_loop(f, floored(seed.amplitude, floor), power, floor, opts);
        Waveform w = from_vector(r.x, phases, grid);
        const double final_score = score(w);
        SCATrace t;
        if (final_score >= raw_score) {
            t.zdc = std::move(r.z);
            t.waveform = std::move(w);
            t.converged = r.converged;
            t.iterations = r.iterations;
            t.kkt_residual = kkt_residual(f, r.x, floor);
        } else {
            t.zdc = {raw_score};
            t.waveform = raw;
            t.converged = r.converged;
            t.kkt_residual = kkt_residual(f, floored(seed.amplitude, floor), floor);
        }
        t.seed = seed.name;
        const double s = std::max(final_score, raw_score);
        if (s > best_score) {
            best_score = s;
            best = std::move(t);
        }
    }
    return best;
}

std::vector<Seed> baseline_seeds(const ChannelRealization& h, double power)
{
    std::vector<Seed> seeds;
    seeds.push_back({"mf", mf(h, power).amplitude});
    seeds.push_back({"up", up_matched(h, power).amplitude});
    seeds.push_back({"ass", ass(h, power).amplitude});
    if (h.antennas() > 1) seeds.push_back({"upmf", upmf(h, power).amplitude});
    return seeds;
}

gp::Posynomial power_constraint(std::size_t vars, std::size_t total, double power)
{
    gp::Posynomial c(total);
    for (std::size_t j = 0; j < vars; ++j) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
        a[static_cast<Eigen::Index>(j)] = 2.0;
        c.add_term(0.5 / power, a);
    }
    return c;
}

void add_floor_constraints(std::vector<gp::Posynomial>& cons, std::size_t vars, std::size_t total,
                           double floor)
{
    for (std::size_t j = 0; j < vars; ++j) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
        a[static_cast<Eigen::Index>(j)] = -1.0;
        cons.emplace_back(gp::Monomial(floor, a));
    }
}

Eigen::VectorXd unit(std::size_t total, std::size_t j, double value)
{
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
    a[static_cast<Eigen::Index>(j)] = value;
    return a;
}

}  // namespace

double kkt_residual(const gp::Posynomial& f, const Eigen::VectorXd& x, double floor)
{
    const Eigen::VectorXd a = gp::condense(f, x).exponents;  // x_j df/dx_j / f
    const Eigen::VectorXd b = 2.0 * x.array().square().matrix() / x.squaredNorm();
    const Eigen::ArrayXd free = (x.array() > 2.0 * floor).cast<double>();
    const double den = (free * b.array().square()).sum();
    const double nu = den > 0.0 ? (free * a.array() * b.array()).sum() / den : 0.0;
    const Eigen::ArrayXd r = a.array() - nu * b.array();
    const Eigen::ArrayXd projected = free * r.abs() + (1.0 - free) * r.max(0.0);
    return projected.maxCoeff();
}

Waveform ss(const ChannelRealization& h, double power)
{
    check_power(power);
    return single_tone(h, 0, power);
}

Waveform up(const FrequencyGrid& grid, std::size_t antennas, double power)
{
    check_power(power);
    if (antennas == 0) throw std::invalid_argument("at least one antenna is required");
    const auto n = static_cast<Eigen::Index>(grid.tones);
    const auto m = static_cast<Eigen::Index>(antennas);
    const double s = std::sqrt(2.0 * power / static_cast<double>(grid.tones * antennas));
    return Waveform(Eigen::MatrixXd::Constant(n, m, s), Eigen::MatrixXd::Zero(n, m), grid);
}

Waveform up_matched(const ChannelRealization& h, double power)
{
    Waveform w = up(h.grid, h.antennas(), power);
    w.phase = optimal_phases(h);
    return w;
}

Waveform ass(const ChannelRealization& h, double power)
{
    check_power(power);
    const Eigen::VectorXd norms = h.tone_norms();
    if (!(norms.maxCoeff() > 0.0)) throw std::invalid_argument("channel is identically zero");
    return single_tone(h, argmax_lowest(norms.array().square().matrix()), power);
}

Waveform upmf(const ChannelRealization& h, double power)
{
    check_power(power);
    const Eigen::VectorXd norms = h.tone_norms();
    const double per_tone = std::sqrt(2.0 * power / static_cast<double>(h.tones()));
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(h.response.rows(), h.response.cols());
    for (Eigen::Index n = 0; n < s.rows(); ++n) {
        if (norms[n] > 0.0)
            s.row(n) = per_tone * h.response.row(n).cwiseAbs() / norms[n];
        else
            s.row(n).setConstant(per_tone / std::sqrt(static_cast<double>(s.cols())));
    }
    return Waveform(s, optimal_phases(h), h.grid);
}

Waveform mf(const ChannelRealization& h, double power)
{
    check_power(power);
    const Eigen::MatrixXd a = h.amplitudes();
    const double total = a.squaredNorm();
    if (!(total > 0.0)) throw std::invalid_argument("matched filter needs a nonzero channel");
    return Waveform(a * std::sqrt(2.0 * power / total), optimal_phases(h), h.grid);
}

Waveform max_papr(const ChannelRealization& h, double power)
{
    check_power(power);
    const Eigen::VectorXd norms = h.tone_norms();
    if (!(norms.minCoeff() > 0.0))
        throw std::invalid_argument("MAX-PAPR needs a nonzero channel on every tone");
    Eigen::MatrixXd s(h.response.rows(), h.response.cols());
    for (Eigen::Index n = 0; n < s.rows(); ++n)
        s.row(n) = h.response.row(n).cwiseAbs() / (norms[n] * norms[n]);
    s *= std::sqrt(2.0 * power) / s.norm();
    return Waveform(s, optimal_phases(h), h.grid);
}

SCATrace optimize(const ChannelRealization& h, double power, const RectennaParams& p,
                  const OptimizerOptions& opts)
{
    check_power(power);
    opts.validate();
    const gp::Posynomial f = zdc_posynomial(h, p);
    const Eigen::MatrixXd phases = optimal_phases(h);
    return multi_start(f, baseline_seeds(h, power), phases, h.grid, power, opts,
                       [&](const Waveform& w) { return zdc_analytic(w, h, p); });
}

SCATrace optimize_decoupled(const ChannelRealization& h, double power, const RectennaParams& p,
                            const OptimizerOptions& opts)
{
    const Eigen::VectorXd norms = h.tone_norms();
    ChannelRealization effective{norms.cast<std::complex<double>>(), h.grid};
    SCATrace t = optimize(effective, power, p, opts);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(h.response.rows(), h.response.cols());
    for (Eigen::Index n = 0; n < s.rows(); ++n)
        if (norms[n] > 0.0) s.row(n) = t.waveform.amplitude(n, 0) * h.response.row(n).cwiseAbs() / norms[n];
    t.waveform = Waveform(s, optimal_phases(h), h.grid);
    return t;
}

namespace {

struct PaprConstraint {
    gp::Posynomial numerator;    // positive part of x_m(t_q)^2
    gp::Posynomial negative;     // negative part of x_m(t_q)^2
    std::size_t antenna = 0;
};

// x_m(t_q)^2 = (sum_n s(n,m) c(n,q))^2 split by the sign of c c'.
std::vector<PaprConstraint> papr_constraints(const FrequencyGrid& grid, const Eigen::MatrixXd& phases,
                                             int oversampling, std::size_t total)
{
    const std::size_t tones = static_cast<std::size_t>(phases.rows());
    const std::size_t antennas = static_cast<std::size_t>(phases.cols());
    const auto q_count = static_cast<std::int64_t>(tones) * oversampling;
    const auto g = static_cast<std::int64_t>(std::llround(grid.harmonic_offset()));
    const bool exact = grid.commensurate();
    std::vector<PaprConstraint> out;
    std::vector<double> c(tones);
    for (std::size_t m = 0; m < antennas; ++m) {
        for (std::int64_t q = 0; q < q_count; ++q) {
            for (std::size_t n = 0; n < tones; ++n) {
                double cycles;
                if (exact) {
                    const std::int64_t r = ((g + static_cast<std::int64_t>(n)) % q_count) * q % q_count;
                    cycles = static_cast<double>(r) / static_cast<double>(q_count);
                } else {
                    cycles = std::fmod(grid.tone_hz(n) / grid.spacing_hz * static_cast<double>(q) /
                                           static_cast<double>(q_count),
                                       1.0);
                }
                c[n] = std::cos(2.0 * std::numbers::pi * cycles +
                                phases(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)));
            }
            PaprConstraint pc{gp::Posynomial(total), gp::Posynomial(total), m};
            for (std::size_t n = 0; n < tones; ++n) {
                for (std::size_t k = n; k < tones; ++k) {
                    const double coef = (n == k ? 1.0 : 2.0) * c[n] * c[k];
                    if (coef == 0.0) continue;
                    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
                    a[static_cast<Eigen::Index>(amplitude_index(n, m, antennas))] += 1.0;
                    a[static_cast<Eigen::Index>(amplitude_index(k, m, antennas))] += 1.0;
                    if (coef > 0.0)
                        pc.numerator.add_term(coef, a);
                    else
                        pc.negative.add_term(-coef, a);
                }
            }
            if (!pc.numerator.empty()) out.push_back(std::move(pc));
        }
    }
    return out;
}

double max_papr_of(const Waveform& w, int oversampling)
{
    double worst = 0.0;
    for (std::size_t m = 0; m < w.antennas(); ++m) worst = std::max(worst, papr(w, m, oversampling));
    return worst;
}

SCATrace papr_sca(const ChannelRealization& h, const gp::Posynomial& f, const Eigen::MatrixXd& phases,
                  const Waveform& seed, const std::string& seed_name, double power, double eta,
                  const OptimizerOptions& opts)
{
    const std::size_t vars = h.tones() * h.antennas();
    const std::size_t total = vars + 1;
    const std::size_t t_index = vars;
    const double floor = opts.floor_ratio * std::sqrt(2.0 * power);
    const std::vector<PaprConstraint> papr_cons = papr_constraints(h.grid, phases, opts.oversampling, total);

    // Fixed constraints: power and floors.
    std::vector<gp::Posynomial> fixed;
    fixed.push_back(power_constraint(vars, total, power));
    add_floor_constraints(fixed, vars, total, floor);

    // 0.5 eta ||s_m||^2 per antenna.
    std::vector<gp::Posynomial> antenna_power(h.antennas(), gp::Posynomial(total));
    for (std::size_t m = 0; m < h.antennas(); ++m)
        for (std::size_t n = 0; n < h.tones(); ++n)
            antenna_power[m].add_term(0.5 * eta, unit(total, amplitude_index(n, m, h.antennas()), 2.0));

    const gp::Posynomial f_ext = f.extended(total);
    // Strictly interior start so the first GP needs no phase one.
    Eigen::VectorXd x = (flatten_amplitudes(seed.amplitude) * (1.0 - 1e-9)).cwiseMax(2.0 * floor);
    double z = f.evaluate(x);

    SCATrace trace;
    trace.seed = seed_name;
    trace.zdc.push_back(z);
    for (int i = 0; i < opts.max_iterations; ++i) {
        Eigen::VectorXd anchor(static_cast<Eigen::Index>(total));
        anchor.head(static_cast<Eigen::Index>(vars)) = x;
        anchor[static_cast<Eigen::Index>(t_index)] = 0.5 * z;

        gp::GPStandardForm prob;
        prob.variables = total;
        prob.objective = gp::Monomial(1.0, unit(total, t_index, -1.0));
        prob.constraints = fixed;
        prob.constraints.emplace_back(gp::Monomial(1.0, unit(total, t_index, 1.0)) *
                                      gp::condense(f_ext, anchor).inverse());
        for (const auto& pc : papr_cons) {
            gp::Posynomial den = antenna_power[pc.antenna];
            if (!pc.negative.empty()) den += pc.negative;
            prob.constraints.push_back(gp::single_condensation_fraction(pc.numerator, den, anchor));
        }
        const gp::SolveReport rep = gp::solve_gp(prob, anchor, opts.gp);
        const Eigen::VectorXd next = rep.x.head(static_cast<Eigen::Index>(vars));
        const double zn = f.evaluate(next);
        if (zn < z) {
            trace.converged = true;
            break;
        }
        x = next;
        trace.zdc.push_back(zn);
        trace.iterations = i + 1;
        const double rel = (zn - z) / z;
        z = zn;
        if (rel < opts.epsilon) {
            trace.converged = true;
            break;
        }
    }
    trace.waveform = from_vector(x, phases, h.grid);
    return trace;
}

}  // namespace

SCATrace optimize_papr(const ChannelRealization& h, double power, double eta, const RectennaParams& p,
                       const OptimizerOptions& opts)
{
    check_power(power);
    opts.validate();
    if (!(eta >= 2.0)) throw std::invalid_argument("PAPR bound below 2 is infeasible for any nonzero antenna signal");
    if (!h.grid.commensurate())
        throw std::invalid_argument("PAPR design needs f0 to be a multiple of the tone spacing");

    const gp::Posynomial f = zdc_posynomial(h, p);
    const Eigen::MatrixXd phases = optimal_phases(h);
    const double floor = opts.floor_ratio * std::sqrt(2.0 * power);
    const double min_eta = 2.0 * (1.0 + 1e-9);
    double eta_solve = std::max(eta, min_eta);

    // Candidate seeds: the unconstrained design and the baselines. Each is
    // blended with ASS (power-preserving, s^2 = (1-b) s_ass^2 + b s_c^2) with
    // b bisected to the largest PAPR-feasible value; a single-tone corner is a
    // fixed point of the condensation, so interior seeds are preferred.
    std::vector<std::pair<std::string, Eigen::MatrixXd>> candidates;
    candidates.emplace_back("opt", optimize(h, power, p, opts).waveform.amplitude);
    for (const auto& s : baseline_seeds(h, power))
        if (s.name != "ass") candidates.emplace_back(s.name, s.amplitude);
    const Eigen::MatrixXd s_ass = ass(h, power).amplitude;

    SCATrace result;
    for (int round = 0; round < 5; ++round) {
        auto feasible = [&](const Eigen::MatrixXd& s) {
            const Eigen::MatrixXd fl =
                unflatten_amplitudes(flatten_amplitudes(s).cwiseMax(floor), h.tones(), h.antennas());
            return max_papr_of(Waveform(fl, phases, h.grid), opts.oversampling) <= eta_solve * (1.0 - 1e-9);
        };
        auto blend = [&](const Eigen::MatrixXd& c, double b) {
            return Eigen::MatrixXd(((1.0 - b) * s_ass.array().square() + b * c.array().square()).sqrt());
        };
        std::string seed_name = "ass";
        Eigen::MatrixXd seed = s_ass;
        double seed_z = f.evaluate(flatten_amplitudes(s_ass).cwiseMax(floor));
        for (const auto& [name, c] : candidates) {
            double b = 1.0;
            if (!feasible(c)) {
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 40; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (feasible(blend(c, mid)) ? lo : hi) = mid;
                }
                b = lo;
            }
            if (b <= 0.0) continue;
            const Eigen::MatrixXd s = blend(c, b);
            const double z = f.evaluate(flatten_amplitudes(s).cwiseMax(floor));
            if (z > seed_z) {
                seed_z = z;
                seed = s;
                seed_name = b < 1.0 ? name + "+ass" : name;
            }
        }
        const Waveform seed_w(seed, phases, h.grid);
        const std::string& seed_label = seed_name;
        result = papr_sca(h, f, phases, seed_w, seed_label, power, eta_solve, opts);

        const double fine = max_papr_of(result.waveform, 4 * opts.oversampling);
        if (fine <= eta * (1.0 + 1e-6) || eta_solve <= min_eta) break;
        eta_solve = std::max(min_eta, eta_solve * eta / fine);
    }
    result.kkt_residual = 0.0;
    return result;
}

Eigen::MatrixXd multi_rectenna_phases(const std::vector<ChannelRealization>& h,
                                      const std::vector<double>& weights, const RectennaParams& p)
{
    if (h.empty() || weights.size() != h.size())
        throw std::invalid_argument("one weight per rectenna channel is required");
    const auto tones = static_cast<Eigen::Index>(h.front().tones());
    const auto antennas = static_cast<Eigen::Index>(h.front().antennas());
    const double k2 = p.k()[0];
    Eigen::MatrixXd phases = Eigen::MatrixXd::Zero(tones, antennas);
    for (Eigen::Index n = 0; n < tones; ++n) {
        Eigen::MatrixXcd stacked(static_cast<Eigen::Index>(h.size()), antennas);
        for (std::size_t u = 0; u < h.size(); ++u)
            stacked.row(static_cast<Eigen::Index>(u)) = std::sqrt(k2 * weights[u]) * h[u].response.row(n);
        if (stacked.squaredNorm() == 0.0) continue;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeThinV);
        Eigen::VectorXcd v = svd.matrixV().col(0);
        const Eigen::VectorXcd received = stacked * v;
        Eigen::Index strongest = 0;
        received.cwiseAbs().maxCoeff(&strongest);
        if (std::abs(received[strongest]) > 0.0) v *= std::polar(1.0, -std::arg(received[strongest]));
        for (Eigen::Index m = 0; m < antennas; ++m) phases(n, m) = std::arg(v[m]);
    }
    return phases;
}

Waveform ass_multi(const std::vector<ChannelRealization>& h, const std::vector<double>& weights,
                   double power, const RectennaParams& p)
{
    check_power(power);
    if (h.empty() || weights.size() != h.size())
        throw std::invalid_argument("one weight per rectenna channel is required");
    const auto tones = static_cast<Eigen::Index>(h.front().tones());
    const auto antennas = static_cast<Eigen::Index>(h.front().antennas());
    const double k2 = p.k()[0];
    Eigen::VectorXd lambda(tones);
    std::vector<Eigen::VectorXcd> beams(static_cast<std::size_t>(tones));
    for (Eigen::Index n = 0; n < tones; ++n) {
        Eigen::MatrixXcd stacked(static_cast<Eigen::Index>(h.size()), antennas);
        for (std::size_t u = 0; u < h.size(); ++u) {
            if (!(weights[u] >= 0.0)) throw std::invalid_argument("rectenna weights must be non-negative");
            stacked.row(static_cast<Eigen::Index>(u)) = std::sqrt(k2 * weights[u]) * h[u].response.row(n);
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeThinV);
        const double sigma = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
        lambda[n] = sigma * sigma;
        Eigen::VectorXcd v = svd.matrixV().col(0);
        const Eigen::VectorXcd received = stacked * v;
        Eigen::Index strongest = 0;
        received.cwiseAbs().maxCoeff(&strongest);
        if (std::abs(received[strongest]) > 0.0) v *= std::polar(1.0, -std::arg(received[strongest]));
        beams[static_cast<std::size_t>(n)] = v;
    }
    if (!(lambda.maxCoeff() > 0.0)) throw std::invalid_argument("weighted channel is identically zero");
    const std::size_t best = argmax_lowest(lambda);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(tones, antennas);
    Eigen::MatrixXd phi = multi_rectenna_phases(h, weights, p);
    const Eigen::VectorXcd& v = beams[best];
    for (Eigen::Index m = 0; m < antennas; ++m) {
        s(static_cast<Eigen::Index>(best), m) = std::sqrt(2.0 * power) * std::abs(v[m]);
        phi(static_cast<Eigen::Index>(best), m) = std::arg(v[m]);
    }
    return Waveform(s, phi, h.front().grid);
}

double weighted_zdc(const Waveform& w, const std::vector<ChannelRealization>& h,
                    const std::vector<double>& weights, const RectennaParams& p)
{
    if (weights.size() != h.size()) throw std::invalid_argument("one weight per rectenna channel is required");
    double z = 0.0;
    for (std::size_t u = 0; u < h.size(); ++u)
        if (weights[u] != 0.0) z += weights[u] * zdc_analytic(w, h[u], p);
    return z;
}

SCATrace optimize_multi(const std::vector<ChannelRealization>& h, const std::vector<double>& weights,
                        double power, const RectennaParams& p, const OptimizerOptions& opts)
{
    check_power(power);
    opts.validate();
    if (h.empty() || weights.size() != h.size())
        throw std::invalid_argument("one weight per rectenna channel is required");
    double weight_sum = 0.0;
    for (double v : weights) {
        if (!(v >= 0.0)) throw std::invalid_argument("rectenna weights must be non-negative");
        weight_sum += v;
    }
    if (!(weight_sum > 0.0)) throw std::invalid_argument("at least one rectenna weight must be positive");

    const Eigen::MatrixXd phases = multi_rectenna_phases(h, weights, p);
    const gp::Signomial sig = weighted_sum_signomial(h, weights, p, phases);
    const FrequencyGrid& grid = h.front().grid;
    auto score = [&](const Waveform& w) { return weighted_zdc(w, h, weights, p); };

    std::vector<Seed> seeds;
    if (h.size() == 1) {
        seeds = baseline_seeds(h.front(), power);
    } else {
        // Stacked channel: sqrt(sum_u v_u |h_u|^2) per entry.
        Eigen::MatrixXd combined = Eigen::MatrixXd::Zero(h.front().response.rows(), h.front().response.cols());
        for (std::size_t u = 0; u < h.size(); ++u)
            combined += weights[u] * h[u].response.cwiseAbs2();
        combined = combined.cwiseSqrt();
        ChannelRealization stacked{combined.cast<std::complex<double>>(), grid};
        seeds.push_back({"ass-multi", ass_multi(h, weights, power, p).amplitude});
        seeds.push_back({"mf", mf(stacked, power).amplitude});
        seeds.push_back({"up", up(grid, h.front().antennas(), power).amplitude});
    }

    if (sig.negative.empty()) return multi_start(sig.positive, seeds, phases, grid, power, opts, score);

    // General signomial: (t + f2) / condensed(f1) <= 1 with power and floors.
    const std::size_t vars = h.front().tones() * h.front().antennas();
    const std::size_t total = vars + 1;
    const double floor = opts.floor_ratio * std::sqrt(2.0 * power);
    std::vector<gp::Posynomial> fixed;
    fixed.push_back(power_constraint(vars, total, power));
    add_floor_constraints(fixed, vars, total, floor);
    const gp::Posynomial f1 = sig.positive.extended(total);
    gp::Posynomial t_plus_f2(gp::Monomial(1.0, unit(total, vars, 1.0)));
    t_plus_f2 += sig.negative.extended(total);

    const Seed* start = &seeds.front();
    double start_z = -std::numeric_limits<double>::infinity();
    for (const auto& s : seeds) {
        const double z = sig.evaluate(floored(s.amplitude, floor));
        if (z > start_z) {
            start_z = z;
            start = &s;
        }
    }
    SCATrace trace;
    trace.seed = start->name;
    Eigen::VectorXd x = (flatten_amplitudes(start->amplitude) * (1.0 - 1e-9)).cwiseMax(2.0 * floor);
    double z = sig.evaluate(x);
    if (!(z > 0.0)) throw SolverError("weighted objective is not positive at the starting point");
    trace.zdc.push_back(z);
    for (int i = 0; i < opts.max_iterations; ++i) {
        Eigen::VectorXd anchor(static_cast<Eigen::Index>(total));
        anchor.head(static_cast<Eigen::Index>(vars)) = x;
        anchor[static_cast<Eigen::Index>(vars)] = 0.5 * z;
        gp::GPStandardForm prob;
        prob.variables = total;
        prob.objective = gp::Monomial(1.0, unit(total, vars, -1.0));
        prob.constraints = fixed;
        prob.constraints.push_back(gp::single_condensation_fraction(t_plus_f2, f1, anchor));
        const gp::SolveReport rep = gp::solve_gp(prob, anchor, opts.gp);
        const Eigen::VectorXd next = rep.x.head(static_cast<Eigen::Index>(vars));
        const double zn = sig.evaluate(next);
        if (zn < z) {
            trace.converged = true;
            break;
        }
        x = next;
        trace.zdc.push_back(zn);
        trace.iterations = i + 1;
        const double rel = (zn - z) / z;
        z = zn;
        if (rel < opts.epsilon) {
            trace.converged = true;
            break;
        }
    }
    trace.waveform = from_vector(x, phases, grid);
    return trace;
}

ToyResult toy_n2(double a0, double a1, double power, const RectennaParams& p)
{
    check_power(power);
    if (p.order != 4) throw std::invalid_argument("the two-tone enumeration assumes a fourth-order model");
    if (!(a0 >= 0.0) || !(a1 >= 0.0)) throw std::invalid_argument("channel amplitudes must be non-negative");
    const std::vector<double> k = p.k();
    const double r = p.diode.r_ant;
    const double k2 = k[0] * r / 2.0;
    const double k4 = 3.0 * k[1] * r * r / 8.0;

    auto z = [&](double s0_sq, double s1_sq) {
        Eigen::VectorXcd x(2);
        x << a0 * std::sqrt(s0_sq), a1 * std::sqrt(s1_sq);
        return zdc_from_tones(x, p);
    };
    ToyResult best{2.0 * power, 0.0, z(2.0 * power, 0.0), false};
    const double z1 = z(0.0, 2.0 * power);
    if (z1 > best.zdc) best = {0.0, 2.0 * power, z1, false};

    const double a0s = a0 * a0, a1s = a1 * a1;
    const double den = 8.0 * k4 * a0s * a1s - 2.0 * k4 * a0s * a0s - 2.0 * k4 * a1s * a1s;
    if (den != 0.0) {
        const double num = 8.0 * power * k4 * a0s * a1s + k2 * a0s - 4.0 * power * k4 * a1s * a1s - k2 * a1s;
        const double s0_sq = num / den;
        if (s0_sq >= 0.0 && s0_sq <= 2.0 * power) {
            const double zi = z(s0_sq, 2.0 * power - s0_sq);
            if (zi > best.zdc) best = {s0_sq, 2.0 * power - s0_sq, zi, true};
        }
    }
    return best;
}

const std::vector<std::string>& strategy_names()
{
    static const std::vector<std::string> names{"ss",  "up",  "ass",           "mf",        "upmf",
                                                "maxpapr", "opt", "opt-decoupled", "opt-papr", "opt-multi"};
    return names;
}

Waveform design(std::string_view strategy, const ChannelRealization& h, double power,
                const RectennaParams& p, const OptimizerOptions& opts, double eta)
{
    if (strategy == "ss") return ss(h, power);
    if (strategy == "up") return up(h.grid, h.antennas(), power);
    if (strategy == "ass") return ass(h, power);
    if (strategy == "mf") return mf(h, power);
    if (strategy == "upmf") return upmf(h, power);
    if (strategy == "maxpapr") return max_papr(h, power);
    if (strategy == "opt") return optimize(h, power, p, opts).waveform;
    if (strategy == "opt-decoupled") return optimize_decoupled(h, power, p, opts).waveform;
    if (strategy == "opt-papr") return optimize_papr(h, power, eta, p, opts).waveform;
    if (strategy == "opt-multi") return optimize_multi({h}, {1.0}, power, p, opts).waveform;
    throw std::invalid_argument("unknown strategy '" + std::string(strategy) + "'");
}

}  // namespace wpt
