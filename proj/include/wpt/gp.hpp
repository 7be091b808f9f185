// SPDX-License-Identifier: Apache-2.0
//
// Monomial/posynomial/signomial algebra over strictly positive variables, the
// AM-GM condensation used by every successive-approximation loop, and a small
// log-domain barrier solver for geometric programs in standard form.

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace wpt::gp {

/// c * prod_j x_j^{a_j} with c > 0.
struct Monomial {
    double coefficient = 1.0;
    Eigen::VectorXd exponents;

    Monomial() = default;
    Monomial(double c, Eigen::VectorXd a);

    std::size_t variables() const { return static_cast<std::size_t>(exponents.size()); }
    double evaluate(const Eigen::VectorXd& x) const;
    double log_evaluate(const Eigen::VectorXd& log_x) const;

    Monomial operator*(const Monomial& other) const;
    Monomial pow(double p) const;
    Monomial inverse() const { return pow(-1.0); }
};

/// Sum of monomials. Terms are stored as log-coefficients plus a dense
/// row-major exponent matrix so evaluation maps onto the SIMD kernels.
class Posynomial {
public:
    explicit Posynomial(std::size_t variables = 0) : vars_(variables) {}
    Posynomial(const Monomial& m);  // NOLINT(implicit)

    void add_term(double coefficient, const Eigen::VectorXd& exponents);
    void add_term(const Monomial& m) { add_term(m.coefficient, m.exponents); }

    std::size_t variables() const { return vars_; }
    std::size_t size() const { return log_coefficients_.size(); }
    bool empty() const { return log_coefficients_.empty(); }

    Monomial term(std::size_t k) const;
    double coefficient(std::size_t k) const;
    double log_coefficient(std::size_t k) const { return log_coefficients_[k]; }
    double exponent(std::size_t k, std::size_t j) const { return exponents_[k * vars_ + j]; }
    const double* exponent_data() const { return exponents_.data(); }
    const double* log_coefficient_data() const { return log_coefficients_.data(); }

    /// log g_k(x) for every term, given log x.
    Eigen::VectorXd term_log_values(const Eigen::VectorXd& log_x) const;
    /// g_k(x) for every term.
    Eigen::VectorXd term_values(const Eigen::VectorXd& x) const;
    double evaluate(const Eigen::VectorXd& x) const;
    /// log f(e^u) by log-sum-exp.
    double log_evaluate(const Eigen::VectorXd& log_x) const;

    /// sum_k w_k * a_k  (weighted exponent sum, length = variables()).
    Eigen::VectorXd weighted_exponents(const Eigen::VectorXd& weights) const;

    Posynomial operator*(const Monomial& m) const;
    Posynomial& operator+=(const Posynomial& other);
    /// Same terms over `total` >= variables() variables (extra exponents zero).
    Posynomial extended(std::size_t total) const;

private:
    std::size_t vars_;
    std::vector<double> log_coefficients_;
    std::vector<double> exponents_;
};

/// f1 - f2 with f1, f2 posynomials (f2 possibly empty).
struct Signomial {
    Posynomial positive;
    Posynomial negative;

    double evaluate(const Eigen::VectorXd& x) const
    {
        return positive.evaluate(x) - (negative.empty() ? 0.0 : negative.evaluate(x));
    }
};

/// minimize objective(x) subject to constraints[i](x) <= 1, x > 0.
struct GPStandardForm {
    std::size_t variables = 0;
    Monomial objective;
    std::vector<Posynomial> constraints;
    std::vector<std::string> variable_names;  // optional, e.g. "s[0,0]" or "t0"

    void validate() const;
};

struct GpOptions {
    double feasibility_tol = 1e-8;
    double kkt_tol = 1e-6;
    double gap_tol = 1e-8;    // m / t at termination (log-objective units)
    double mu = 10.0;         // barrier parameter growth per outer step
    int max_newton_steps = 200;
    int max_outer_iterations = 40;
};

struct SolveReport {
    Eigen::VectorXd x;
    double objective = 0.0;
    std::vector<double> constraint_values;  // f_i(x), each <= 1 on success
    Eigen::VectorXd multipliers;            // log-domain Lagrange multipliers
    double kkt_residual = 0.0;
    double duality_gap = 0.0;
    int newton_steps = 0;
    int outer_iterations = 0;
    bool phase_one_used = false;
    bool converged = false;
};

/// AM-GM lower bound of f that is tight at `anchor`:
/// prod_k (g_k / gamma_k)^{gamma_k} with gamma_k = g_k(anchor) / f(anchor).
Monomial condense(const Posynomial& f, const Eigen::VectorXd& anchor);

/// Replaces the denominator of numerator/denominator <= 1 by its condensed
/// monomial at `anchor`, giving a posynomial constraint that implies the
/// original one and has identical slack at the anchor.
Posynomial single_condensation_fraction(const Posynomial& numerator, const Posynomial& denominator,
                                        const Eigen::VectorXd& anchor);

/// Log-domain primal barrier method with damped Newton centering. `start`
/// must be strictly positive; if it is not strictly feasible a phase-one GP
/// is solved first. Throws SolverError when infeasible or when the iteration
/// caps are exhausted.
SolveReport solve_gp(const GPStandardForm& problem, const Eigen::VectorXd& start,
                     const GpOptions& options = {});

/// Closed-form maximizer of prod_j x_j^{a_j} subject to 0.5 * ||x||^2 <= power:
/// x_j^2 = 2 P a_j / sum_k a_k for a_j > 0; variables with a_j = 0 sit at `floor`.
Eigen::VectorXd maximize_monomial_under_power(const Monomial& objective, double power,
                                              double floor);

/// Debug dump: one monomial per line as "coefficient j:a_j ...".
void write_gp(std::ostream& os, const GPStandardForm& problem);

}  // namespace wpt::gp
