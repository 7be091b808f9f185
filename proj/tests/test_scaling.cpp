#include <doctest.h>

#include "wpt/channel.hpp"
#include "wpt/optimizer.hpp"
#include "wpt/rectenna.hpp"
#include "wpt/scaling.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace wpt;
using namespace wpt::scaling;

namespace {

constexpr double kP = 1e-5;
constexpr double kR = 50.0;

// k2 and k4 straight from the diode law, independent of the library.
double k2() { return 5e-6 / (2.0 * std::pow(1.05 * 25.86e-3, 2)); }
double k4() { return 5e-6 / (24.0 * std::pow(1.05 * 25.86e-3, 4)); }

Scenario scenario(Strategy s, Regime r, std::size_t n, std::size_t m = 1, std::size_t u = 1)
{
    Scenario sc;
    sc.strategy = s;
    sc.regime = r;
    sc.tones = n;
    sc.antennas = m;
    sc.rectennas = u;
    sc.power = kP;
    return sc;
}

void check_mc(const Scenario& sc, double expected, std::size_t trials, std::uint64_t seed = 1)
{
    const auto mc = monte_carlo(sc, trials, seed);
    INFO(to_string(sc.strategy) << '/' << to_string(sc.regime) << " N=" << sc.tones << " M=" << sc.antennas
                                << " mean=" << mc.mean << " cf=" << expected << " se=" << mc.stderr_);
    CHECK(std::abs(mc.mean - expected) <= 4.0 * mc.stderr_);
}

}  // namespace

TEST_CASE("harmonic numbers")
{
    CHECK(harmonic_H(1) == 1.0);
    CHECK(harmonic_S(1) == 1.0);
    CHECK(harmonic_H(4) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
    CHECK(harmonic_S(2) == doctest::Approx(7.0 / 4.0).epsilon(1e-15));
    for (std::size_t n = 1; n <= 15; ++n) {
        CHECK(harmonic_H_alternating(n) == doctest::Approx(harmonic_H(n)).epsilon(1e-9));
        CHECK(harmonic_S_alternating(n) == doctest::Approx(harmonic_S(n)).epsilon(1e-9));
    }
    double h = 0.0, s = 0.0;
    for (std::size_t n = 1; n <= 200; ++n) {
        h += 1.0 / static_cast<double>(n);
        s += h / static_cast<double>(n);
        CHECK(harmonic_H(n) == doctest::Approx(h).epsilon(1e-14));
        CHECK(harmonic_S(n) == doctest::Approx(s).epsilon(1e-14));
        if (n >= 10) CHECK(std::abs(h - (std::log(static_cast<double>(n)) + euler_gamma)) <= 1.5 / (2.0 * n));
    }
}

TEST_CASE("closed forms")
{
    const double a2 = k2() * kR * kP, a4 = k4() * kR * kR * kP * kP;
    CHECK(closed_form(scenario(Strategy::ss, Regime::flat, 1)).lower == doctest::Approx(a2 + 3 * a4).epsilon(1e-13));
    CHECK(closed_form(scenario(Strategy::ss, Regime::selective, 1)).lower == doctest::Approx(a2 + 3 * a4).epsilon(1e-13));
    for (std::size_t n : {1u, 2u, 8u, 32u}) {
        const double ratio = (2.0 * n * n + 1) / (2.0 * n);
        CHECK(closed_form(scenario(Strategy::up, Regime::flat, n)).lower ==
              doctest::Approx(a2 + 2 * a4 * ratio).epsilon(1e-13));
        CHECK(closed_form(scenario(Strategy::up, Regime::selective, n)).lower ==
              doctest::Approx(a2 + 3 * a4).epsilon(1e-13));
        for (std::size_t m : {1u, 2u, 4u})
            CHECK(closed_form(scenario(Strategy::upmf, Regime::flat, n, m)).lower ==
                  doctest::Approx(a2 * m + a4 * ratio * m * (m + 1.0)).epsilon(1e-13));
    }
    CHECK(closed_form(scenario(Strategy::ass, Regime::selective, 4)).lower ==
          doctest::Approx(a2 * 25.0 / 12.0 + 3 * a4 * harmonic_S(4)).epsilon(1e-13));
    CHECK(closed_form(scenario(Strategy::up, Regime::flat, 8, 1, 3)).lower ==
          doctest::Approx(3.0 * closed_form(scenario(Strategy::up, Regime::flat, 8)).lower).epsilon(1e-13));
    const auto bounds = closed_form(scenario(Strategy::upmf, Regime::selective, 8, 2));
    CHECK_FALSE(bounds.exact());
    CHECK(bounds.lower < bounds.upper);

    CHECK_THROWS_AS(closed_form(scenario(Strategy::ss, Regime::flat, 2)), std::invalid_argument);
    CHECK_THROWS_AS(closed_form(scenario(Strategy::ass, Regime::selective, 4, 2)), std::invalid_argument);
    auto sixth = scenario(Strategy::up, Regime::flat, 2);
    sixth.params.order = 6;
    CHECK_THROWS_AS(closed_form(sixth), std::invalid_argument);
}

TEST_CASE("UP is the two-tone optimum on a flat channel")
{
    const RectennaParams p;
    const auto toy = toy_n2(1.0, 1.0, kP, p);
    const auto h = flat_channel(1.0, 0.0, FrequencyGrid::commensurate_grid(2, 1e5), 1);
    CHECK(zdc_analytic(up(h.grid, 1, kP), h, p) == doctest::Approx(toy.zdc).epsilon(1e-12));
}

TEST_CASE("fourth-order sum lower bound")
{
    // F = sum over n0+n1 = n2+n3 of s s s s, read off z_DC on a unit flat channel.
    const RectennaParams p;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (std::size_t n = 2; n <= 6; ++n) {
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd s(static_cast<Eigen::Index>(n));
            for (auto& v : s) v = u(rng);
            s *= std::sqrt(2 * kP) / s.norm();
            const auto grid = FrequencyGrid::commensurate_grid(n, 1e5);
            const Waveform w(s, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 1), grid);
            const double f = even_moments(received_tone_coefficients(w, flat_channel(1.0, 0.0, grid, 1)), 4).m4 * 8.0 / 3.0;
            double cross = 0.0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a + 1; b < n; ++b) cross += s(a) * s(a) * s(b) * s(b);
            const double bound = 4 * kP * kP + 2 * cross;
            if (n == 2)
                CHECK(f == doctest::Approx(bound).epsilon(1e-12));
            else
                CHECK(f > bound * (1 + 1e-9));
        }
    }
}

TEST_CASE("Monte Carlo agrees with the closed forms")
{
    const double a2 = k2() * kR * kP, a4 = k4() * kR * kR * kP * kP;
    check_mc(scenario(Strategy::up, Regime::flat, 8), a2 + 2 * a4 * (129.0 / 16.0), 20000);
    check_mc(scenario(Strategy::ss, Regime::flat, 1), a2 + 3 * a4, 20000);
    check_mc(scenario(Strategy::ss, Regime::selective, 1), a2 + 3 * a4, 20000, 2);
    for (std::size_t n : {2u, 8u}) check_mc(scenario(Strategy::up, Regime::selective, n), a2 + 3 * a4, 20000, 3);
    check_mc(scenario(Strategy::ass, Regime::selective, 4), a2 * harmonic_H(4) + 3 * a4 * harmonic_S(4), 20000);
    check_mc(scenario(Strategy::upmf, Regime::flat, 4, 2), a2 * 2 + a4 * (33.0 / 8.0) * 6.0, 20000);
}

TEST_CASE("UPMF selective bounds bracket the Monte Carlo mean")
{
    for (std::size_t n : {4u, 8u, 16u}) {
        for (std::size_t m : {1u, 2u, 4u}) {
            const auto sc = scenario(Strategy::upmf, Regime::selective, n, m);
            const auto cf = closed_form(sc);
            const auto mc = monte_carlo(sc, 3000, 9);
            INFO("N=" << n << " M=" << m);
            CHECK(cf.lower <= mc.mean + 4 * mc.stderr_);
            CHECK(cf.upper >= mc.mean - 4 * mc.stderr_);
        }
    }
}

TEST_CASE("Monte Carlo is deterministic and worker independent")
{
    const auto sc = scenario(Strategy::ass, Regime::selective, 8);
    const auto a = monte_carlo(sc, 1000, 77, 1);
    const auto b = monte_carlo(sc, 1000, 77, 3);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(monte_carlo(sc, 1000, 78, 1).mean != a.mean);
    CHECK_THROWS_AS(monte_carlo(sc, 99, 1), std::invalid_argument);
}

TEST_CASE("channel hardening")
{
    const auto rows = hardening_curve({1, 4, 16, 64, 256}, 4, kP, 5, 200);
    REQUIRE(rows.size() == 5);
    CHECK(rows.back().norm_deviation < rows.front().norm_deviation);
    CHECK(rows.back().zdc_deviation < rows.front().zdc_deviation);
    // UP power split on four tones: F = 4 P^2 (2N^2 + 1) / (3N).
    const double f = 4 * kP * kP * 33.0 / 12.0;
    for (const auto& r : rows) {
        const double m = static_cast<double>(r.antennas);
        CHECK(r.zdc_hardened == doctest::Approx(k2() * kR * kP * m + 0.375 * k4() * kR * kR * m * m * f).epsilon(1e-12));
    }
    CHECK(rows.back().zdc_deviation <= 0.05);
    CHECK_THROWS_AS(hardening_curve({4, 2}, 4, kP, 5, 10), std::invalid_argument);
}

TEST_CASE("CSV rows")
{
    const auto sc = scenario(Strategy::up, Regime::flat, 4);
    std::ostringstream os;
    write_csv_header(os);
    write_csv_row(os, sc, closed_form(sc), {1.5e-6, 2e-9, 100});
    const std::string text = os.str();
    CHECK(text.rfind("strategy,regime,tones,antennas,rectennas,power_w,closed_form,closed_form_upper,mc_mean,mc_stderr\n", 0) == 0);
    CHECK(text.find("\nup,flat,4,1,1,1e-05,") != std::string::npos);
    CHECK(parse_strategy("upmf") == Strategy::upmf);
    CHECK(parse_regime("selective") == Regime::selective);
    CHECK_THROWS_AS(parse_strategy("opt"), std::invalid_argument);
}
