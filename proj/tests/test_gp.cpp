#include <doctest.h>

#include "wpt/errors.hpp"
#include "wpt/gp.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace wpt;
using namespace wpt::gp;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v)
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x(i++) = d;
    return x;
}

Posynomial random_posynomial(std::mt19937_64& rng, std::size_t vars, std::size_t terms)
{
    std::uniform_real_distribution<double> c(0.1, 3.0), a(-2.0, 2.0);
    Posynomial f(vars);
    for (std::size_t k = 0; k < terms; ++k) {
        Eigen::VectorXd e(static_cast<Eigen::Index>(vars));
        for (auto& x : e) x = a(rng);
        f.add_term(c(rng), e);
    }
    return f;
}

Eigen::VectorXd random_point(std::mt19937_64& rng, std::size_t vars)
{
    std::uniform_real_distribution<double> l(-1.5, 1.5);
    Eigen::VectorXd x(static_cast<Eigen::Index>(vars));
    for (auto& v : x) v = std::exp(l(rng));
    return x;
}

// 0.5 * sum x_j^2 / P <= 1
Posynomial power_constraint(std::size_t vars, double power)
{
    Posynomial f(vars);
    for (std::size_t j = 0; j < vars; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vars));
        e(static_cast<Eigen::Index>(j)) = 2.0;
        f.add_term(0.5 / power, e);
    }
    return f;
}

}  // namespace

TEST_CASE("monomial arithmetic is exponent arithmetic")
{
    std::mt19937_64 rng(1);
    const Monomial a(2.0, vec({1.0, -0.5, 3.0}));
    const Monomial b(0.7, vec({-2.0, 1.5, 0.25}));
    for (int t = 0; t < 50; ++t) {
        const auto x = random_point(rng, 3);
        CHECK((a * b).evaluate(x) == doctest::Approx(a.evaluate(x) * b.evaluate(x)).epsilon(1e-13));
        CHECK(a.pow(2.5).evaluate(x) == doctest::Approx(std::pow(a.evaluate(x), 2.5)).epsilon(1e-12));
        CHECK(a.inverse().evaluate(x) == doctest::Approx(1.0 / a.evaluate(x)).epsilon(1e-13));
        CHECK(a.log_evaluate(x.array().log().matrix()) == doctest::Approx(std::log(a.evaluate(x))).epsilon(1e-13));
    }
    CHECK(((a * b).exponents - (a.exponents + b.exponents)).norm() == 0.0);
    CHECK_THROWS(Monomial(-1.0, vec({1.0})));
}

TEST_CASE("posynomial evaluation paths agree")
{
    std::mt19937_64 rng(2);
    const auto f = random_posynomial(rng, 5, 23);
    const Monomial m(1.5, vec({0.5, 0.0, -1.0, 2.0, 0.0}));
    for (int t = 0; t < 20; ++t) {
        const auto x = random_point(rng, 5);
        double direct = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) direct += f.term(k).evaluate(x);
        CHECK(f.evaluate(x) == doctest::Approx(direct).epsilon(1e-12));
        CHECK(f.log_evaluate(x.array().log().matrix()) == doctest::Approx(std::log(direct)).epsilon(1e-12));
        CHECK(f.term_values(x).sum() == doctest::Approx(direct).epsilon(1e-12));
        CHECK((f * m).evaluate(x) == doctest::Approx(direct * m.evaluate(x)).epsilon(1e-12));
        Posynomial g = f;
        g += f;
        CHECK(g.evaluate(x) == doctest::Approx(2.0 * direct).epsilon(1e-12));
        Eigen::VectorXd x7(7);
        x7 << x, 3.0, 4.0;
        CHECK(f.extended(7).evaluate(x7) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("condensation of x + 1/x at x = 1")
{
    Posynomial f(1);
    f.add_term(1.0, vec({1.0}));
    f.add_term(1.0, vec({-1.0}));
    const Monomial c = condense(f, vec({1.0}));
    CHECK(c.coefficient == doctest::Approx(2.0));
    CHECK(std::abs(c.exponents(0)) < 1e-15);
    for (double x : {0.01, 0.3, 1.0, 2.0, 50.0}) CHECK(c.evaluate(vec({x})) <= f.evaluate(vec({x})) * (1 + 1e-12));
}

TEST_CASE("condensing a monomial returns it")
{
    const Monomial m(3.0, vec({1.0, -2.0}));
    const Monomial c = condense(Posynomial(m), vec({0.4, 1.7}));
    CHECK(c.coefficient == doctest::Approx(3.0).epsilon(1e-13));
    CHECK((c.exponents - m.exponents).norm() < 1e-14);
}

TEST_CASE("condensation is a tight global lower bound")
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        const auto f = random_posynomial(rng, 4, 2 + t);
        const auto anchor = random_point(rng, 4);
        const auto c = condense(f, anchor);
        CHECK(c.evaluate(anchor) == doctest::Approx(f.evaluate(anchor)).epsilon(1e-12));
        for (int s = 0; s < 1000; ++s) {
            const auto x = random_point(rng, 4);
            CHECK(c.evaluate(x) <= f.evaluate(x) * (1.0 + 1e-12));
        }
    }
    Posynomial f(1);
    f.add_term(1.0, vec({1.0}));
    CHECK_THROWS_AS(condense(f, vec({0.0})), std::invalid_argument);
    CHECK_THROWS_AS(condense(f, vec({-1.0})), std::invalid_argument);
}

TEST_CASE("single condensation of a fraction is conservative")
{
    std::mt19937_64 rng(4);
    const auto num = random_posynomial(rng, 3, 4);
    const auto den = random_posynomial(rng, 3, 5);
    const auto anchor = random_point(rng, 3);
    const auto conservative = single_condensation_fraction(num, den, anchor);
    CHECK(conservative.evaluate(anchor) == doctest::Approx(num.evaluate(anchor) / den.evaluate(anchor)).epsilon(1e-12));
    for (int s = 0; s < 1000; ++s) {
        const auto x = random_point(rng, 3);
        if (conservative.evaluate(x) <= 1.0) CHECK(num.evaluate(x) <= den.evaluate(x) * (1.0 + 1e-12));
        CHECK(conservative.evaluate(x) >= num.evaluate(x) / den.evaluate(x) * (1.0 - 1e-12));
    }
    // A monomial denominator is kept as is.
    const Monomial m(2.0, vec({1.0, 0.0, -1.0}));
    const auto same = single_condensation_fraction(num, Posynomial(m), anchor);
    for (int s = 0; s < 20; ++s) {
        const auto x = random_point(rng, 3);
        CHECK(same.evaluate(x) == doctest::Approx(num.evaluate(x) / m.evaluate(x)).epsilon(1e-12));
    }
}

TEST_CASE("solve_gp on the two-variable product")
{
    const double P = 0.37;
    GPStandardForm gp;
    gp.variables = 2;
    gp.objective = Monomial(1.0, vec({-2.0, -2.0}));
    gp.constraints = {power_constraint(2, P)};
    const auto r = solve_gp(gp, vec({0.1, 0.2}));
    CHECK(r.converged);
    CHECK(r.x(0) == doctest::Approx(std::sqrt(P)).epsilon(1e-6));
    CHECK(r.x(1) == doctest::Approx(std::sqrt(P)).epsilon(1e-6));
    CHECK(1.0 / r.objective == doctest::Approx(P * P).epsilon(1e-6));
    CHECK(r.kkt_residual <= 1e-6);
    for (double c : r.constraint_values) CHECK(c <= 1.0 + 1e-8);
}

TEST_CASE("solve_gp matches the closed-form monomial maximizer")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> b(0.2, 4.0);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 2 + t % 5;
        const double P = 1e-5 * (1 + t);
        Eigen::VectorXd a(static_cast<Eigen::Index>(n));
        for (auto& v : a) v = b(rng);
        const Monomial obj(1.0, a);
        const auto closed = maximize_monomial_under_power(obj, P, 1e-12 * std::sqrt(2 * P));
        for (std::size_t j = 0; j < n; ++j)
            CHECK(closed(j) * closed(j) == doctest::Approx(2.0 * P * a(j) / a.sum()).epsilon(1e-12));

        GPStandardForm gp;
        gp.variables = n;
        gp.objective = obj.inverse();
        gp.constraints = {power_constraint(n, P)};
        const auto r = solve_gp(gp, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1e-4 * std::sqrt(P)));
        CHECK(r.converged);
        CHECK(r.kkt_residual <= 1e-6);
        for (std::size_t j = 0; j < n; ++j) CHECK(r.x(j) == doctest::Approx(closed(j)).epsilon(1e-8));
        for (double c : r.constraint_values) CHECK(c <= 1.0 + 1e-8);
    }
}

TEST_CASE("closed-form maximizer corner cases")
{
    const auto sym = maximize_monomial_under_power(Monomial(1.0, vec({2.0, 2.0})), 1.0, 1e-12);
    CHECK(sym(0) == doctest::Approx(1.0));
    CHECK(sym(1) == doctest::Approx(1.0));
    const auto corner = maximize_monomial_under_power(Monomial(1.0, vec({4.0, 0.0})), 1.0, 1e-9);
    CHECK(corner(0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(corner(1) == 1e-9);
    CHECK_THROWS_AS(maximize_monomial_under_power(Monomial(1.0, vec({0.0, 0.0})), 1.0, 1e-9), std::invalid_argument);
}

TEST_CASE("solve_gp with a start outside the feasible set")
{
    GPStandardForm gp;
    gp.variables = 3;
    gp.objective = Monomial(1.0, vec({-1.0, -2.0, -1.0}));
    gp.constraints = {power_constraint(3, 1.0)};
    Posynomial cap(3);
    cap.add_term(2.0, vec({1.0, 0.0, 0.0}));  // 2 x0 <= 1
    gp.constraints.push_back(cap);
    const auto r = solve_gp(gp, vec({5.0, 5.0, 5.0}));
    CHECK(r.phase_one_used);
    CHECK(r.converged);
    for (double c : r.constraint_values) CHECK(c <= 1.0 + 1e-8);
    CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.kkt_residual <= 1e-6);
}

TEST_CASE("infeasible programs raise SolverError")
{
    GPStandardForm gp;
    gp.variables = 1;
    gp.objective = Monomial(1.0, vec({-1.0}));
    Posynomial lo(1), hi(1);
    lo.add_term(1.0, vec({1.0}));   // x <= 1
    hi.add_term(2.0, vec({-1.0}));  // x >= 2
    gp.constraints = {lo, hi};
    CHECK_THROWS_AS(solve_gp(gp, vec({1.5})), SolverError);
}

TEST_CASE("debug dump lists one monomial per line")
{
    GPStandardForm gp;
    gp.variables = 2;
    gp.objective = Monomial(1.0, vec({-2.0, -2.0}));
    gp.constraints = {power_constraint(2, 1.0)};
    std::ostringstream os;
    write_gp(os, gp);
    const std::string text = os.str();
    CHECK(std::count(text.begin(), text.end(), '\n') >= 3);
    CHECK(text.find("0:-2") != std::string::npos);
}
