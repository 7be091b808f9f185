#include <doctest.h>

#include "wpt/channel.hpp"
#include "wpt/optimizer.hpp"
#include "wpt/rectenna.hpp"
#include "wpt/waveform.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

using namespace wpt;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

struct Instance {
    Waveform w;
    ChannelRealization h;
};

Instance random_instance(std::mt19937_64& rng, std::size_t tones, std::size_t antennas, double scale = 0.05)
{
    std::uniform_real_distribution<double> amp(0.0, scale), ph(-kPi, kPi);
    const auto grid = FrequencyGrid::commensurate_grid(tones, 1e5);
    Eigen::MatrixXd s(tones, antennas), phi(tones, antennas);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        s.data()[i] = amp(rng);
        phi.data()[i] = ph(rng);
    }
    auto h = iid_frequency_channel(grid, antennas, 1, rng(), 0).front();
    return {Waveform(s, phi, grid), h};
}

// Brute-force average of y(t)^i over one envelope period, independent of the
// library's synthesis and SIMD kernels.
double time_average_oracle(const Waveform& w, const ChannelRealization& h, const DiodeParams& d, int order)
{
    const auto& g = w.grid;
    const long harmonic = std::lround(g.f0_hz / g.spacing_hz);
    const std::size_t samples = 2 * static_cast<std::size_t>(order) * (harmonic + w.tones()) + 7;
    std::vector<cd> x(w.tones());
    for (std::size_t n = 0; n < w.tones(); ++n)
        for (std::size_t m = 0; m < w.antennas(); ++m)
            x[n] += h.response(n, m) * std::polar(w.amplitude(n, m), w.phase(n, m));
    double z = 0.0;
    for (int i = 2; i <= order; i += 2) {
        double acc = 0.0;
        for (std::size_t k = 0; k < samples; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(samples) / g.spacing_hz;
            double y = 0.0;
            for (std::size_t n = 0; n < w.tones(); ++n)
                y += std::real(x[n] * std::exp(cd{0.0, 2.0 * kPi * g.tone_hz(n) * t}));
            acc += std::pow(y, i);
        }
        double fact = 1.0;
        for (int j = 2; j <= i; ++j) fact *= j;
        const double k_i = d.i_s / (fact * std::pow(d.n * d.v_t, i));
        z += k_i * std::pow(d.r_ant, i / 2.0) * acc / static_cast<double>(samples);
    }
    return z;
}

RectennaParams params(int order)
{
    RectennaParams p;
    p.order = order;
    return p;
}

}  // namespace

TEST_CASE("Taylor coefficients")
{
    const DiodeParams d;
    const auto k = taylor_coefficients(d, 6);
    REQUIRE(k.size() == 3);
    // Typical values quoted for i_s = 5 uA, n = 1.05, v_t = 25.86 mV.
    CHECK(k[0] == doctest::Approx(0.0034).epsilon(5e-3));
    CHECK(k[1] == doctest::Approx(0.3829).epsilon(5e-3));
    const double nvt = 1.05 * 25.86e-3;
    CHECK(k[0] == doctest::Approx(5e-6 / (2.0 * nvt * nvt)).epsilon(1e-14));
    CHECK(k[1] == doctest::Approx(5e-6 / (24.0 * std::pow(nvt, 4))).epsilon(1e-14));
    CHECK(k[2] == doctest::Approx(5e-6 / (720.0 * std::pow(nvt, 6))).epsilon(1e-14));
    CHECK(k[2] == doctest::Approx(17.3).epsilon(5e-3));
    CHECK(taylor_coefficients(d, 2).size() == 1);
    CHECK_THROWS_AS(taylor_coefficients(d, 3), std::invalid_argument);
    CHECK_THROWS_AS(taylor_coefficients(d, 8), std::invalid_argument);
    CHECK_THROWS_AS(taylor_coefficients(d, 0), std::invalid_argument);
    DiodeParams bad;
    bad.i_s = 0.0;
    CHECK_THROWS_AS(taylor_coefficients(bad, 4), std::invalid_argument);
}

TEST_CASE("received tone coefficients")
{
    const auto g1 = FrequencyGrid::commensurate_grid(1, 1e5);
    Eigen::MatrixXd s(1, 1), phi = Eigen::MatrixXd::Zero(1, 1);
    s << 2.0;
    const auto x = received_tone_coefficients(Waveform(s, phi, g1), flat_channel(1.0, 0.0, g1, 1));
    CHECK(x(0) == cd{2.0, 0.0});

    std::mt19937_64 rng(3);
    auto inst = random_instance(rng, 5, 3);
    const auto direct = received_tone_coefficients(inst.w, inst.h);
    for (std::size_t n = 0; n < 5; ++n) {
        cd ref{0.0, 0.0};
        for (std::size_t m = 0; m < 3; ++m) ref += inst.h.response(n, m) * std::polar(inst.w.amplitude(n, m), inst.w.phase(n, m));
        CHECK(std::abs(direct(n) - ref) <= 1e-15 + 1e-13 * std::abs(ref));
    }

    // Matched phases make every tone real and equal to sum_m s A.
    Waveform matched(inst.w.amplitude, optimal_phases(inst.h), inst.w.grid);
    const auto xm = received_tone_coefficients(matched, inst.h);
    const Eigen::MatrixXd a = inst.h.amplitudes();
    for (std::size_t n = 0; n < 5; ++n) {
        CHECK(std::abs(std::arg(xm(n))) < 1e-12);
        CHECK(xm(n).real() == doctest::Approx(inst.w.amplitude.row(n).dot(a.row(n))).epsilon(1e-13));
    }
}

TEST_CASE("z_DC closed forms on a unit flat channel")
{
    const auto p = params(4);
    const auto k = p.k();
    const double P = 1e-5, R = 50.0;

    const auto g4 = FrequencyGrid::commensurate_grid(4, 1e5);
    const double z4 = zdc_analytic(up(g4, 1, P), flat_channel(1.0, 0.0, g4, 1), p);
    const double z4_ref = k[0] * R * P + k[1] * R * R * (33.0 / 8.0) * P * P;
    CHECK(z4 == doctest::Approx(z4_ref).epsilon(1e-13));
    CHECK(z4 == doctest::Approx(2.095e-6).epsilon(5e-3));  // quoted with the rounded k values

    const auto g1 = FrequencyGrid::commensurate_grid(1, 1e5);
    const double z1 = zdc_analytic(up(g1, 1, P), flat_channel(1.0, 0.0, g1, 1), p);
    CHECK(z1 == doctest::Approx(k[0] * R * P + 1.5 * k[1] * R * R * P * P).epsilon(1e-13));
    CHECK(z1 == doctest::Approx(1.844e-6).epsilon(5e-3));

    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 1);
    CHECK(zdc_analytic(Waveform(zero, zero, g4), flat_channel(1.0, 0.0, g4, 1), p) == 0.0);

    auto bad = p;
    bad.order = 5;
    CHECK_THROWS_AS(zdc_analytic(up(g4, 1, P), flat_channel(1.0, 0.0, g4, 1), bad), std::invalid_argument);
}

TEST_CASE("single tone moments")
{
    Eigen::VectorXcd x(1);
    x << cd{0.3, -0.4};
    const auto m = even_moments(x, 6);
    CHECK(m.m2 == doctest::Approx(0.25 / 2.0));
    CHECK(m.m4 == doctest::Approx(0.0625 * 3.0 / 8.0));
    CHECK(m.m6 == doctest::Approx(0.015625 * 5.0 / 16.0));
    const auto m2 = even_moments(x, 2);
    CHECK(m2.m4 == 0.0);
}

TEST_CASE("analytic z_DC agrees with a brute-force time average")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + trial % 8, m = 1 + trial % 4;
        const int order = 2 + 2 * (trial % 3);
        const auto inst = random_instance(rng, n, m);
        const auto p = params(order);
        const double za = zdc_analytic(inst.w, inst.h, p);
        const double oracle = time_average_oracle(inst.w, inst.h, p.diode, order);
        const double lib = zdc_time_average(inst.w, inst.h, p);
        INFO("N=" << n << " M=" << m << " order=" << order);
        CHECK(std::abs(za - oracle) <= 1e-9 * za);
        CHECK(std::abs(za - lib) <= 1e-9 * za);
    }
}

TEST_CASE("time average needs a commensurate grid")
{
    std::mt19937_64 rng(1);
    auto inst = random_instance(rng, 3, 1);
    inst.w.grid.f0_hz += 0.5 * inst.w.grid.spacing_hz;
    inst.h.grid = inst.w.grid;
    CHECK_THROWS_AS(zdc_time_average(inst.w, inst.h, params(4)), std::invalid_argument);
}

TEST_CASE("matched phases maximize z_DC for fixed amplitudes")
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    for (int t = 0; t < 10; ++t) {
        const auto inst = random_instance(rng, 4, 2);
        const auto p = params(2 + 2 * (t % 3));
        const double best = zdc_analytic(Waveform(inst.w.amplitude, optimal_phases(inst.h), inst.w.grid), inst.h, p);
        for (int r = 0; r < 100; ++r) {
            Eigen::MatrixXd phi(4, 2);
            for (Eigen::Index i = 0; i < phi.size(); ++i) phi.data()[i] = ph(rng);
            CHECK(zdc_analytic(Waveform(inst.w.amplitude, phi, inst.w.grid), inst.h, p) <= best * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("order-i terms are homogeneous of degree i")
{
    std::mt19937_64 rng(5);
    const auto inst = random_instance(rng, 5, 2);
    const auto p = params(6);
    const auto tones = received_tone_coefficients(inst.w, inst.h);
    const auto base = zdc_breakdown(tones, p);
    for (double c : {0.5, 2.0, 3.7}) {
        const auto scaled = zdc_breakdown((tones * c).eval(), p);
        CHECK(scaled.order2 == doctest::Approx(base.order2 * std::pow(c, 2)).epsilon(1e-12));
        CHECK(scaled.order4 == doctest::Approx(base.order4 * std::pow(c, 4)).epsilon(1e-12));
        CHECK(scaled.order6 == doctest::Approx(base.order6 * std::pow(c, 6)).epsilon(1e-12));
    }
    Waveform doubled(inst.w.amplitude * 2.0, inst.w.phase, inst.w.grid);
    const auto dt = zdc_breakdown(received_tone_coefficients(doubled, inst.h), p);
    CHECK(dt.order4 == doctest::Approx(16.0 * base.order4).epsilon(1e-12));
}

TEST_CASE("output current fixed point")
{
    const auto p = params(4);
    CHECK(iout_fixed_point(0.0, p) == 0.0);
    double prev = 0.0;
    const double nvt = p.diode.n_vt();
    for (double z : {1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4}) {
        const double i = iout_fixed_point(z, p);
        CHECK(i > prev);
        prev = i;
        const double lhs = std::exp(p.diode.r_load * i / nvt) * (i + p.diode.i_s);
        const double rhs = p.diode.i_s + z;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
    }
    CHECK_THROWS_AS(iout_fixed_point(-1.0, p), std::invalid_argument);
}

TEST_CASE("transmit synthesis")
{
    const auto g1 = FrequencyGrid::commensurate_grid(1, 1e5, 3);
    Eigen::MatrixXd s = Eigen::MatrixXd::Ones(1, 1), phi = Eigen::MatrixXd::Zero(1, 1);
    const std::vector<double> times{0.0, 1e-7, 3.3e-6, 7.1e-6};
    const auto x = synthesize_transmit(Waveform(s, phi, g1), 0, times);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(x[k] == doctest::Approx(std::cos(g1.angular(0) * times[k])));

    std::mt19937_64 rng(8);
    const auto a = random_instance(rng, 6, 2);
    const auto b = random_instance(rng, 6, 2);
    const std::size_t K = 2 * (100 + 6) * 2 + 1;
    std::vector<double> grid_t(K);
    for (std::size_t k = 0; k < K; ++k) grid_t[k] = static_cast<double>(k) / K * a.w.grid.period_s();
    for (std::size_t m = 0; m < 2; ++m) {
        const auto xa = synthesize_transmit(a.w, m, grid_t);
        double mean_sq = 0.0;
        for (double v : xa) mean_sq += v * v / K;
        CHECK(mean_sq == doctest::Approx(0.5 * a.w.amplitude.col(m).squaredNorm()).epsilon(1e-12));

        // Same phases, summed amplitudes: samples add.
        Waveform sum(a.w.amplitude + b.w.amplitude, a.w.phase, a.w.grid);
        Waveform b_same(b.w.amplitude, a.w.phase, a.w.grid);
        const auto xs = synthesize_transmit(sum, m, grid_t);
        const auto xb = synthesize_transmit(b_same, m, grid_t);
        for (std::size_t k = 0; k < K; ++k) CHECK(xs[k] == doctest::Approx(xa[k] + xb[k]).scale(1e-3));
    }
    CHECK_THROWS_AS(synthesize_transmit(a.w, 2, grid_t), std::out_of_range);
}

TEST_CASE("PAPR")
{
    const auto g1 = FrequencyGrid::commensurate_grid(1, 1e5);
    Eigen::MatrixXd s = Eigen::MatrixXd::Constant(1, 1, 0.3), phi = Eigen::MatrixXd::Zero(1, 1);
    CHECK(papr(Waveform(s, phi, g1), 0, 8) == doctest::Approx(2.0).epsilon(1e-12));

    const auto g8 = FrequencyGrid::commensurate_grid(8, 1e5);
    Eigen::MatrixXd s8 = Eigen::MatrixXd::Constant(8, 1, 0.1), phi8 = Eigen::MatrixXd::Zero(8, 1);
    CHECK(papr(Waveform(s8, phi8, g8), 0, 8) == doctest::Approx(16.0).epsilon(1e-12));

    std::mt19937_64 rng(9);
    const auto inst = random_instance(rng, 6, 2);
    const double base = papr(inst.w, 1, 8);
    CHECK(base >= 1.0);
    CHECK(papr(Waveform(inst.w.amplitude * 17.0, inst.w.phase, inst.w.grid), 1, 8) == doctest::Approx(base).epsilon(1e-12));

    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(8, 1);
    CHECK_THROWS_AS(papr(Waveform(z, phi8, g8), 0, 8), std::invalid_argument);
}

TEST_CASE("index tuple counts")
{
    CHECK(count_index_tuples(2, 4) == 6);
    CHECK(count_index_tuples(4, 4) == 44);
    for (std::size_t n = 1; n <= 12; ++n) CHECK(count_index_tuples(n, 4) == n * (2 * n * n + 1) / 3);
    CHECK(count_index_tuples(3, 2) == 3);
    // Brute force for the sixth-order set.
    for (std::size_t n = 1; n <= 4; ++n) {
        std::uint64_t c = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t e = 0; e < n; ++e)
                    for (std::size_t f = 0; f < n; ++f)
                        for (std::size_t g = 0; g < n; ++g)
                            for (std::size_t q = 0; q < n; ++q) c += (a + b + e == f + g + q);
        CHECK(count_index_tuples(n, 6) == c);
    }
}

TEST_CASE("posynomial view of z_DC")
{
    std::mt19937_64 rng(10);
    for (int order : {2, 4, 6}) {
        const auto inst = random_instance(rng, 4, 2);
        const auto p = params(order);
        const auto f = zdc_posynomial(inst.h, p);
        CHECK(f.variables() == 8);
        for (int t = 0; t < 20; ++t) {
            const auto other = random_instance(rng, 4, 2);
            const Waveform w(other.w.amplitude, optimal_phases(inst.h), inst.h.grid);
            const double direct = zdc_analytic(w, inst.h, p);
            CHECK(f.evaluate(flatten_amplitudes(w.amplitude)) == doctest::Approx(direct).epsilon(1e-12));
        }
    }
    const auto x = flatten_amplitudes((Eigen::MatrixXd(2, 3) << 1, 2, 3, 4, 5, 6).finished());
    CHECK(x(amplitude_index(1, 2, 3)) == 6.0);
    CHECK(unflatten_amplitudes(x, 2, 3)(1, 0) == 4.0);
}

TEST_CASE("weighted multi-rectenna signomial")
{
    std::mt19937_64 rng(11);
    const auto grid = FrequencyGrid::commensurate_grid(3, 1e5);
    const auto hs = iid_frequency_channel(grid, 2, 3, 12, 0);
    const auto p = params(4);
    std::uniform_real_distribution<double> ph(-kPi, kPi), amp(0.0, 0.05);
    Eigen::MatrixXd phi(3, 2);
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi.data()[i] = ph(rng);
    const std::vector<double> v{0.2, 1.0, 0.5};
    const auto sig = weighted_sum_signomial(hs, v, p, phi);
    CHECK_FALSE(sig.negative.empty());
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXd s(3, 2);
        for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = amp(rng);
        const Waveform w(s, phi, grid);
        double ref = 0.0;
        for (std::size_t u = 0; u < 3; ++u) ref += v[u] * zdc_analytic(w, hs[u], p);
        CHECK(sig.evaluate(flatten_amplitudes(s)) == doctest::Approx(ref).epsilon(1e-12));
        const auto sig3 = weighted_sum_signomial(hs, {0.6, 3.0, 1.5}, p, phi);
        CHECK(sig3.evaluate(flatten_amplitudes(s)) == doctest::Approx(3.0 * ref).epsilon(1e-12));
    }

    const auto single = weighted_sum_signomial({hs[0]}, {1.0}, p, optimal_phases(hs[0]));
    CHECK(single.negative.empty());
    const auto post = zdc_posynomial(hs[0], p);
    Eigen::VectorXd s = Eigen::VectorXd::Constant(6, 0.02);
    CHECK(single.positive.evaluate(s) == doctest::Approx(post.evaluate(s)).epsilon(1e-12));
}

TEST_CASE("waveform file round trip is bit exact")
{
    std::mt19937_64 rng(12);
    const auto inst = random_instance(rng, 7, 3);
    std::stringstream ss;
    write_waveform(ss, inst.w, 1.234567e-5);
    const auto back = read_waveform(ss);
    CHECK(back.power_budget == 1.234567e-5);
    CHECK(back.waveform.amplitude == inst.w.amplitude);
    CHECK(back.waveform.phase == inst.w.phase);
    CHECK(back.waveform.grid.f0_hz == inst.w.grid.f0_hz);
    CHECK(back.waveform.grid.spacing_hz == inst.w.grid.spacing_hz);

    std::stringstream broken("tones 2\nantennas 1\n");
    CHECK_THROWS_AS(read_waveform(broken), std::invalid_argument);
    CHECK_THROWS_AS(Waveform(-Eigen::MatrixXd::Ones(2, 1), Eigen::MatrixXd::Zero(2, 1), FrequencyGrid::commensurate_grid(2, 1e5)),
                    std::invalid_argument);
}
