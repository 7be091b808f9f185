// SPDX-License-Identifier: Apache-2.0

#include "wpt/gp.hpp"

#include "wpt/errors.hpp"
#include "wpt/format.hpp"
#include "wpt/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wpt::gp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Monomial::Monomial(double c, Eigen::VectorXd a) : coefficient(c), exponents(std::move(a))
{
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("monomial coefficient must be positive and finite");
}

double Monomial::evaluate(const Eigen::VectorXd& x) const
{
    return std::exp(log_evaluate(x.array().log().matrix()));
}

double Monomial::log_evaluate(const Eigen::VectorXd& log_x) const
{
    if (log_x.size() != exponents.size())
        throw std::invalid_argument("monomial evaluated with wrong variable count");
    return std::log(coefficient) + exponents.dot(log_x);
}

Monomial Monomial::operator*(const Monomial& other) const
{
    if (other.exponents.size() != exponents.size())
        throw std::invalid_argument("monomial product over different variable counts");
    return Monomial(coefficient * other.coefficient, exponents + other.exponents);
}

Monomial Monomial::pow(double p) const
{
    return Monomial(std::pow(coefficient, p), exponents * p);
}

Posynomial::Posynomial(const Monomial& m) : vars_(m.variables())
{
    add_term(m);
}

void Posynomial::add_term(double coefficient, const Eigen::VectorXd& exponents)
{
    if (static_cast<std::size_t>(exponents.size()) != vars_)
        throw std::invalid_argument("posynomial term has wrong variable count");
    if (!(coefficient > 0.0) || !std::isfinite(coefficient))
        throw std::invalid_argument("posynomial coefficient must be positive and finite");
    log_coefficients_.push_back(std::log(coefficient));
    exponents_.insert(exponents_.end(), exponents.data(), exponents.data() + exponents.size());
}

Monomial Posynomial::term(std::size_t k) const
{
    Eigen::VectorXd a(vars_);
    for (std::size_t j = 0; j < vars_; ++j) a[j] = exponent(k, j);
    return Monomial(coefficient(k), a);
}

double Posynomial::coefficient(std::size_t k) const
{
    return std::exp(log_coefficients_[k]);
}

Eigen::VectorXd Posynomial::term_log_values(const Eigen::VectorXd& log_x) const
{
    if (static_cast<std::size_t>(log_x.size()) != vars_)
        throw std::invalid_argument("posynomial evaluated with wrong variable count");
    Eigen::VectorXd out(size());
    simd::kernels().affine_rows(exponents_.data(), size(), vars_, log_x.data(),
                                log_coefficients_.data(), out.data());
    return out;
}

Eigen::VectorXd Posynomial::term_values(const Eigen::VectorXd& x) const
{
    return term_log_values(x.array().log().matrix()).array().exp().matrix();
}

double Posynomial::evaluate(const Eigen::VectorXd& x) const
{
    return term_values(x).sum();
}

double Posynomial::log_evaluate(const Eigen::VectorXd& log_x) const
{
    if (empty()) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd l = term_log_values(log_x);
    const double peak = l.maxCoeff();
    return peak + std::log((l.array() - peak).exp().sum());
}

Eigen::VectorXd Posynomial::weighted_exponents(const Eigen::VectorXd& weights) const
{
    if (static_cast<std::size_t>(weights.size()) != size())
        throw std::invalid_argument("weight vector length differs from term count");
    Eigen::VectorXd out(vars_);
    simd::kernels().weighted_row_sum(exponents_.data(), size(), vars_, weights.data(), out.data());
    return out;
}

Posynomial Posynomial::operator*(const Monomial& m) const
{
    if (m.variables() != vars_)
        throw std::invalid_argument("posynomial times monomial over different variable counts");
    Posynomial out(vars_);
    const double lc = std::log(m.coefficient);
    for (std::size_t k = 0; k < size(); ++k) {
        out.log_coefficients_.push_back(log_coefficients_[k] + lc);
        for (std::size_t j = 0; j < vars_; ++j)
            out.exponents_.push_back(exponent(k, j) + m.exponents[static_cast<Eigen::Index>(j)]);
    }
    return out;
}

Posynomial& Posynomial::operator+=(const Posynomial& other)
{
    if (other.vars_ != vars_)
        throw std::invalid_argument("posynomial sum over different variable counts");
    log_coefficients_.insert(log_coefficients_.end(), other.log_coefficients_.begin(),
                             other.log_coefficients_.end());
    exponents_.insert(exponents_.end(), other.exponents_.begin(), other.exponents_.end());
    return *this;
}

Posynomial Posynomial::extended(std::size_t total) const
{
    if (total < vars_) throw std::invalid_argument("cannot shrink a posynomial's variable set");
    Posynomial out(total);
    out.log_coefficients_ = log_coefficients_;
    out.exponents_.assign(size() * total, 0.0);
    for (std::size_t k = 0; k < size(); ++k)
        for (std::size_t j = 0; j < vars_; ++j) out.exponents_[k * total + j] = exponent(k, j);
    return out;
}

void GPStandardForm::validate() const
{
    if (variables == 0) throw std::invalid_argument("GP has no variables");
    if (objective.variables() != variables)
        throw std::invalid_argument("GP objective has wrong variable count");
    for (const auto& c : constraints) {
        if (c.variables() != variables)
            throw std::invalid_argument("GP constraint has wrong variable count");
        if (c.empty()) throw std::invalid_argument("GP constraint has no terms");
    }
    if (!variable_names.empty() && variable_names.size() != variables)
        throw std::invalid_argument("GP variable names do not match the variable count");
}

Monomial condense(const Posynomial& f, const Eigen::VectorXd& anchor)
{
    if (f.empty()) throw std::invalid_argument("cannot condense an empty posynomial");
    if ((anchor.array() <= 0.0).any()) throw std::invalid_argument("condensation anchor must be positive");
    const Eigen::VectorXd l = f.term_log_values(anchor.array().log().matrix());
    const double peak = l.maxCoeff();
    const double lse = peak + std::log((l.array() - peak).exp().sum());
    Eigen::VectorXd gamma = (l.array() - lse).exp().matrix();
    double log_c = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double gk = gamma[static_cast<Eigen::Index>(k)];
        if (gk <= 0.0) continue;
        log_c += gk * (f.log_coefficient(k) - (l[static_cast<Eigen::Index>(k)] - lse));
    }
    return Monomial(std::exp(log_c), f.weighted_exponents(gamma));
}

Posynomial single_condensation_fraction(const Posynomial& numerator, const Posynomial& denominator,
                                        const Eigen::VectorXd& anchor)
{
    return numerator * condense(denominator, anchor).inverse();
}

namespace {

// Constraint values, gradients and Hessians in log variables.
struct ConstraintEval {
    double value = 0.0;  // F = log f(e^u)
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

double log_sum_exp(const Eigen::VectorXd& l)
{
    const double peak = l.maxCoeff();
    return peak + std::log((l.array() - peak).exp().sum());
}

ConstraintEval evaluate_constraint(const Posynomial& f, const Eigen::VectorXd& u, bool with_hessian)
{
    ConstraintEval out;
    const Eigen::VectorXd l = f.term_log_values(u);
    out.value = log_sum_exp(l);
    const Eigen::VectorXd gamma = (l.array() - out.value).exp().matrix();
    out.gradient = f.weighted_exponents(gamma);
    if (with_hessian) {
        const Eigen::Map<const RowMatrix> e(f.exponent_data(), static_cast<Eigen::Index>(f.size()),
                                            static_cast<Eigen::Index>(f.variables()));
        out.hessian = e.transpose() * gamma.asDiagonal() * e - out.gradient * out.gradient.transpose();
    }
    return out;
}

struct BarrierResult {
    Eigen::VectorXd u;
    double t = 1.0;
    int newton_steps = 0;
    int outer = 0;
    bool stopped_early = false;
    bool converged = false;
};

// Log slacks log(-F_i(u)); false if any constraint is not strictly satisfied.
bool log_slacks(const std::vector<Posynomial>& cons, const Eigen::VectorXd& u, Eigen::VectorXd& out)
{
    out.resize(static_cast<Eigen::Index>(cons.size()));
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const double f = cons[i].log_evaluate(u);
        if (!(f < 0.0)) return false;
        out[static_cast<Eigen::Index>(i)] = std::log(-f);
    }
    return true;
}

BarrierResult run_barrier(const std::vector<Posynomial>& cons, const Eigen::VectorXd& a0,
                          Eigen::VectorXd u, const GpOptions& opt, double stop_below,
                          double log_c0)
{
    const auto m = static_cast<double>(std::max<std::size_t>(cons.size(), 1));
    const auto n = u.size();
    BarrierResult res;
    res.t = 1.0;
    Eigen::VectorXd slack, trial_slack;
    if (!log_slacks(cons, u, slack)) throw SolverError("barrier started outside the feasible set");
    // g = t a0 + sum_i grad F_i / s_i; the optional Hessian is its Jacobian.
    auto barrier_gradient = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& at_slack,
                                Eigen::MatrixXd* hessian) {
        Eigen::VectorXd g = res.t * a0;
        if (hessian) *hessian = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < cons.size(); ++i) {
            const ConstraintEval ev = evaluate_constraint(cons[i], at, hessian != nullptr);
            const double s = std::exp(at_slack[static_cast<Eigen::Index>(i)]);
            g += ev.gradient / s;
            if (hessian) *hessian += ev.hessian / s + ev.gradient * ev.gradient.transpose() / (s * s);
        }
        return g;
    };
    for (int outer = 0; outer < opt.max_outer_iterations; ++outer) {
        res.outer = outer + 1;
        // On the last barrier level the centering is pushed until the scaled
        // gradient, which is the reported KKT residual, is well below tolerance.
        const bool last = m / res.t <= opt.gap_tol;
        for (int step = 0; step < opt.max_newton_steps; ++step) {
            Eigen::MatrixXd h;
            const Eigen::VectorXd g = barrier_gradient(u, slack, &h);
            const double gnorm = g.cwiseAbs().maxCoeff();
            if (last && gnorm / res.t <= 0.01 * opt.kkt_tol) break;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
            Eigen::VectorXd dir = ldlt.solve(-g);
            if (ldlt.info() != Eigen::Success || !dir.allFinite() || g.dot(dir) >= 0.0) {
                // Objective directions not curved by any constraint: regularize.
                const double reg = 1e-10 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
                Eigen::MatrixXd hr = h + reg * Eigen::MatrixXd::Identity(n, n);
                dir = hr.ldlt().solve(-g);
                if (!dir.allFinite() || g.dot(dir) >= 0.0) dir = -g;
            }
            const double decrement = -g.dot(dir);
            if (decrement / 2.0 <= (last ? 1e-24 : 1e-10)) break;

            // Barrier change evaluated term by term: the absolute barrier
            // value grows with t and would swamp the decrease in rounding.
            double alpha = 1.0;
            bool accepted = false;
            while (alpha > 1e-18) {
                const Eigen::VectorXd trial = u + alpha * dir;
                if (log_slacks(cons, trial, trial_slack)) {
                    const double change = res.t * alpha * a0.dot(dir) - (trial_slack - slack).sum();
                    if (change <= -0.01 * alpha * decrement) {
                        u = trial;
                        slack = trial_slack;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                // Near the center the barrier change drowns in rounding of the
                // log slacks; fall back to requiring a smaller gradient.
                for (alpha = 1.0; alpha >= 1.0 / 1024.0; alpha *= 0.5) {
                    const Eigen::VectorXd trial = u + alpha * dir;
                    if (!log_slacks(cons, trial, trial_slack)) continue;
                    if (barrier_gradient(trial, trial_slack, nullptr).cwiseAbs().maxCoeff() < gnorm) {
                        u = trial;
                        slack = trial_slack;
                        accepted = true;
                        break;
                    }
                }
            }
            ++res.newton_steps;
            if (!accepted) break;  // rounding floor reached
            if (stop_below < 0.0 && log_c0 + a0.dot(u) < stop_below) {
                res.u = u;
                res.stopped_early = true;
                return res;
            }
        }
        if (last) {
            res.converged = true;
            break;
        }
        res.t *= opt.mu;
    }
    res.u = u;
    return res;
}

}  // namespace

SolveReport solve_gp(const GPStandardForm& problem, const Eigen::VectorXd& start,
                     const GpOptions& options)
{
    problem.validate();
    if (static_cast<std::size_t>(start.size()) != problem.variables)
        throw std::invalid_argument("GP start point has wrong dimension");
    if (!(start.array() > 0.0).all() || !start.allFinite())
        throw std::invalid_argument("GP start point must be strictly positive");

    const std::size_t nv = problem.variables;
    Eigen::VectorXd u = start.array().log().matrix();
    SolveReport report;

    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& c : problem.constraints) worst = std::max(worst, c.log_evaluate(u));

    if (!(worst < 0.0)) {
        // Phase one: minimize r subject to f_i / r <= 1 and r >= 1/2.
        report.phase_one_used = true;
        std::vector<Posynomial> cons;
        Eigen::VectorXd inv_r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv + 1));
        inv_r[static_cast<Eigen::Index>(nv)] = -1.0;
        const Monomial over_r(1.0, inv_r);
        for (const auto& c : problem.constraints) cons.push_back(c.extended(nv + 1) * over_r);
        cons.emplace_back(Monomial(0.5, inv_r));
        // Box of +-20 nepers around the start keeps the phase-one problem bounded.
        for (std::size_t j = 0; j < nv; ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv + 1));
            e[static_cast<Eigen::Index>(j)] = 1.0;
            const double uj = u[static_cast<Eigen::Index>(j)];
            cons.emplace_back(Monomial(std::exp(-uj - 20.0), e));
            cons.emplace_back(Monomial(std::exp(uj - 20.0), -e));
        }
        Eigen::VectorXd a0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv + 1));
        a0[static_cast<Eigen::Index>(nv)] = 1.0;
        Eigen::VectorXd v(static_cast<Eigen::Index>(nv + 1));
        v.head(static_cast<Eigen::Index>(nv)) = u;
        v[static_cast<Eigen::Index>(nv)] = std::max(worst, std::log(0.5)) + 1.0;
        const BarrierResult p1 = run_barrier(cons, a0, v, options, -1e-10, 0.0);
        report.newton_steps += p1.newton_steps;
        u = p1.u.head(static_cast<Eigen::Index>(nv));
        worst = -std::numeric_limits<double>::infinity();
        for (const auto& c : problem.constraints) worst = std::max(worst, c.log_evaluate(u));
        if (!(worst < 0.0)) throw SolverError("geometric program is infeasible (phase one optimum >= 1)");
    }

    const Eigen::VectorXd& a0 = problem.objective.exponents;
    const double log_c0 = std::log(problem.objective.coefficient);
    const BarrierResult br = run_barrier(problem.constraints, a0, u, options, 0.0, log_c0);
    if (!br.u.allFinite()) throw SolverError("barrier iterates diverged");
    if (!br.converged) throw SolverError("barrier method exhausted its outer iteration budget");

    report.x = br.u.array().exp().matrix();
    report.objective = std::exp(log_c0 + a0.dot(br.u));
    report.newton_steps += br.newton_steps;
    report.outer_iterations = br.outer;
    report.duality_gap = static_cast<double>(problem.constraints.size()) / br.t;
    report.multipliers.resize(static_cast<Eigen::Index>(problem.constraints.size()));
    Eigen::VectorXd residual = a0;
    for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
        const ConstraintEval ev = evaluate_constraint(problem.constraints[i], br.u, false);
        report.constraint_values.push_back(std::exp(ev.value));
        const double lambda = 1.0 / (br.t * -ev.value);
        report.multipliers[static_cast<Eigen::Index>(i)] = lambda;
        residual += lambda * ev.gradient;
    }
    report.kkt_residual = residual.cwiseAbs().maxCoeff();
    report.converged = report.kkt_residual <= options.kkt_tol;
    for (double v : report.constraint_values)
        if (v > 1.0 + options.feasibility_tol) report.converged = false;
    return report;
}

Eigen::VectorXd maximize_monomial_under_power(const Monomial& objective, double power, double floor)
{
    if (!(power > 0.0)) throw std::invalid_argument("power budget must be positive");
    const Eigen::VectorXd& a = objective.exponents;
    if ((a.array() < 0.0).any())
        throw std::invalid_argument("monomial has a negative exponent; the power-constrained maximum is unbounded");
    const double total = a.sum();
    if (!(total > 0.0)) throw std::invalid_argument("monomial does not depend on any variable");
    Eigen::VectorXd x(a.size());
    for (Eigen::Index j = 0; j < a.size(); ++j)
        x[j] = std::max(floor, std::sqrt(2.0 * power * a[j] / total));
    return x;
}

void write_gp(std::ostream& os, const GPStandardForm& problem)
{
    auto write_monomial = [&](double c, auto exponent_at) {
        os << format_double(c);
        for (std::size_t j = 0; j < problem.variables; ++j) {
            const double a = exponent_at(j);
            if (a != 0.0) os << ' ' << j << ':' << format_double(a);
        }
        os << '\n';
    };
    os << "# variables " << problem.variables << '\n';
    for (std::size_t j = 0; j < problem.variable_names.size(); ++j)
        os << "# x" << j << " = " << problem.variable_names[j] << '\n';
    os << "minimize\n";
    write_monomial(problem.objective.coefficient,
                   [&](std::size_t j) { return problem.objective.exponents[static_cast<Eigen::Index>(j)]; });
    for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
        const auto& c = problem.constraints[i];
        os << "subject to " << i << " terms " << c.size() << '\n';
        for (std::size_t k = 0; k < c.size(); ++k)
            write_monomial(c.coefficient(k), [&](std::size_t j) { return c.exponent(k, j); });
    }
}

}  // namespace wpt::gp
