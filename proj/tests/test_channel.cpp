#include <doctest.h>

#include "wpt/channel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

using namespace wpt;
using cd = std::complex<double>;

namespace {

struct Moments {
    double mean = 0.0;
    double stderr_ = 0.0;
};

template <class F>
Moments sample(std::size_t count, F&& draw)
{
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = draw(i);
        s += x;
        s2 += x * x;
    }
    const double n = static_cast<double>(count);
    const double mean = s / n;
    return {mean, std::sqrt((s2 / n - mean * mean) / (n - 1.0))};
}

void check_within(const Moments& m, double expected, double sigmas = 3.0)
{
    INFO("mean " << m.mean << " expected " << expected << " stderr " << m.stderr_);
    CHECK(std::abs(m.mean - expected) <= sigmas * m.stderr_);
}

PowerDelayProfile single_tap()
{
    PowerDelayProfile p;
    p.taps = {{0.0, 1.0}};
    return p;
}

}  // namespace

TEST_CASE("power delay profile validation")
{
    CHECK_NOTHROW(PowerDelayProfile::exponential().validate());
    CHECK(PowerDelayProfile::exponential().taps.size() == 18);

    PowerDelayProfile p;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.taps = {{0.0, 0.5}, {1e-8, 0.4}};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.taps = {{1e-8, 0.5}, {0.0, 0.5}};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.taps = {{0.0, 1.0}, {1e-8, 0.0}};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS(generate_taps(PowerDelayProfile{}, 1), std::invalid_argument);
}

TEST_CASE("tap draws have the complex Gaussian moments")
{
    const auto profile = single_tap();
    constexpr std::size_t draws = 1'000'000;
    std::vector<double> power(draws);
    for (std::size_t i = 0; i < draws; ++i) power[i] = std::norm(generate_taps(profile, 7, i)[0].gain);
    check_within(sample(draws, [&](std::size_t i) { return power[i]; }), 1.0);
    check_within(sample(draws, [&](std::size_t i) { return power[i] * power[i]; }), 2.0);
}

TEST_CASE("exponential profile sample powers sum to one")
{
    const auto profile = PowerDelayProfile::exponential();
    const auto m = sample(100'000, [&](std::size_t i) {
        double total = 0.0;
        for (const auto& t : generate_taps(profile, 11, i)) total += std::norm(t.gain);
        return total;
    });
    check_within(m, 1.0);
}

TEST_CASE("tap draws are deterministic per seed and index")
{
    const auto profile = PowerDelayProfile::exponential();
    const auto a = generate_taps(profile, 5, 3);
    const auto b = generate_taps(profile, 5, 3);
    const auto c = generate_taps(profile, 5, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t l = 0; l < a.size(); ++l) {
        CHECK(a[l].gain == b[l].gain);
        CHECK(a[l].delay_s == profile.taps[l].delay_s);
    }
    CHECK(a[0].gain != c[0].gain);
}

TEST_CASE("frequency response of simple tap sets")
{
    const auto grid = FrequencyGrid::commensurate_grid(8, 1.25e6, 4144);

    SUBCASE("unit path at zero delay")
    {
        const auto h = frequency_response({{{1.0, 0.0}, 0.0}}, {1, 0.029}, {0.3}, grid);
        for (std::size_t n = 0; n < grid.tones; ++n) CHECK(std::abs(h.response(n, 0) - cd{1.0, 0.0}) < 1e-15);
    }

    SUBCASE("broadside array gives identical antennas")
    {
        const auto h = frequency_response({{{0.3, -0.7}, 35e-9}}, {2, 0.029}, {std::numbers::pi / 2}, grid);
        for (std::size_t n = 0; n < grid.tones; ++n)
            CHECK(std::abs(h.response(n, 0) - h.response(n, 1)) < 1e-15);
    }

    SUBCASE("two taps against a direct sum")
    {
        const TapSet taps{{{0.8, 0.1}, 0.0}, {{-0.2, 0.5}, 120e-9}};
        const std::vector<double> theta{0.4, 2.1};
        const ArrayConfig array{3, 0.021};
        const auto g2 = FrequencyGrid::commensurate_grid(2, 2e6, 2590);
        const auto h = frequency_response(taps, array, theta, g2);
        const double c = 299792458.0;
        for (std::size_t n = 0; n < 2; ++n) {
            const double f = g2.f0_hz + n * g2.spacing_hz;
            for (std::size_t m = 0; m < 3; ++m) {
                cd ref{0.0, 0.0};
                for (std::size_t l = 0; l < 2; ++l) {
                    const double shift = 2 * std::numbers::pi * m * array.spacing_m * f / c * std::cos(theta[l]);
                    ref += taps[l].gain * std::exp(cd{0.0, -2 * std::numbers::pi * f * taps[l].delay_s + shift});
                }
                CHECK(std::abs(h.response(n, m) - ref) <= 1e-12 * std::abs(ref));
            }
        }
    }

    CHECK_THROWS_AS(frequency_response({{{1.0, 0.0}, 0.0}}, {1, 0.029}, {}, grid), std::invalid_argument);
}

TEST_CASE("frequency response is linear in the taps")
{
    const auto profile = PowerDelayProfile::exponential();
    const auto grid = FrequencyGrid::centered(16, 5.18e9, 10e6);
    const ArrayConfig array{4, 0.029};
    const auto a = generate_taps(profile, 1, 0);
    const auto b = generate_taps(profile, 1, 1);
    std::vector<double> ta(a.size()), tb(b.size());
    for (std::size_t l = 0; l < a.size(); ++l) {
        ta[l] = 0.1 * static_cast<double>(l);
        tb[l] = 3.0 - 0.15 * static_cast<double>(l);
    }
    TapSet ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    std::vector<double> tab = ta;
    tab.insert(tab.end(), tb.begin(), tb.end());
    const auto ha = frequency_response(a, array, ta, grid).response;
    const auto hb = frequency_response(b, array, tb, grid).response;
    const auto hab = frequency_response(ab, array, tab, grid).response;
    CHECK((hab - ha - hb).cwiseAbs().maxCoeff() <= 1e-12 * hab.cwiseAbs().maxCoeff());
}

TEST_CASE("first antenna carries no array phase shift")
{
    const auto grid = FrequencyGrid::centered(8, 5.18e9, 10e6);
    for (std::uint64_t r = 0; r < 5; ++r) {
        const auto taps = generate_taps(PowerDelayProfile::exponential(), 9, r);
        std::vector<double> theta(taps.size());
        for (std::size_t l = 0; l < theta.size(); ++l) theta[l] = 0.37 * static_cast<double>(l + r);
        const auto h4 = frequency_response(taps, {4, 0.029}, theta, grid);
        const auto h1 = frequency_response(taps, {1, 0.029}, theta, grid);
        CHECK((h4.response.col(0) - h1.response.col(0)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("multipath ensemble power equals the profile total")
{
    const auto profile = PowerDelayProfile::exponential();
    const auto grid = FrequencyGrid::centered(4, 5.18e9, 10e6);
    const ArrayConfig array{2, 0.029};
    const auto m = sample(100'000, [&](std::size_t i) {
        return std::norm(multipath_channel(profile, array, grid, 21, i).response(i % 4, i % 2));
    });
    check_within(m, 1.0);
}

TEST_CASE("iid channel moments")
{
    const auto grid = FrequencyGrid::commensurate_grid(10, 1e5);
    constexpr std::size_t antennas = 3, draws = 100'000;
    std::vector<double> entry, norm2;
    entry.reserve(draws * 10 * antennas);
    norm2.reserve(draws * 10);
    for (std::size_t i = 0; i < draws; ++i) {
        const auto h = iid_frequency_channel(grid, antennas, 1, 3, i).front();
        for (std::size_t n = 0; n < 10; ++n) {
            for (std::size_t m = 0; m < antennas; ++m) entry.push_back(std::norm(h.response(n, m)));
            norm2.push_back(h.response.row(n).squaredNorm());
        }
    }
    check_within(sample(entry.size(), [&](std::size_t i) { return entry[i]; }), 1.0);
    check_within(sample(norm2.size(), [&](std::size_t i) { return norm2[i]; }), 3.0);
    check_within(sample(norm2.size(), [&](std::size_t i) { return norm2[i] * norm2[i]; }), 3.0 * 4.0);

    const auto a = iid_frequency_channel(grid, 2, 3, 8, 4);
    const auto b = iid_frequency_channel(grid, 2, 3, 8, 4);
    REQUIRE(a.size() == 3);
    for (std::size_t u = 0; u < 3; ++u) CHECK(a[u].response == b[u].response);
    CHECK(a[0].response != a[1].response);
}

TEST_CASE("flat channel")
{
    const auto grid = FrequencyGrid::commensurate_grid(5, 1e5);
    const auto ones = flat_channel(1.0, 0.0, grid, 3);
    CHECK(ones.response == Eigen::MatrixXcd::Ones(5, 3));
    const auto neg = flat_channel(2.0, std::numbers::pi, grid, 2);
    CHECK((neg.response.array() - cd{-2.0, 0.0}).abs().maxCoeff() < 1e-15);
    const auto a = neg.amplitudes();
    CHECK(a.maxCoeff() == a.minCoeff());
}

TEST_CASE("channel text round trip is exact")
{
    const auto grid = FrequencyGrid::centered(6, 5.18e9, 5e6);
    const auto h = iid_frequency_channel(grid, 2, 2, 99, 0);
    std::stringstream ss;
    write_channel(ss, h);
    const auto back = read_channel(ss, grid);
    REQUIRE(back.size() == 2);
    for (std::size_t u = 0; u < 2; ++u) CHECK(back[u].response == h[u].response);
}
