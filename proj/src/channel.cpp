// SPDX-License-Identifier: Apache-2.0

#include "wpt/channel.hpp"

#include "wpt/format.hpp"
#include "wpt/rng.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wpt {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

void PowerDelayProfile::validate() const
{
    if (taps.empty()) throw std::invalid_argument("power delay profile has no taps");
    double total = 0.0;
    double prev_delay = 0.0;
    for (const auto& tap : taps) {
        if (!(tap.mean_power > 0.0)) throw std::invalid_argument("tap power must be positive");
        if (!(tap.delay_s >= prev_delay)) throw std::invalid_argument("tap delays must be nondecreasing and non-negative");
        prev_delay = tap.delay_s;
        total += tap.mean_power;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("tap powers must sum to one");
}

PowerDelayProfile PowerDelayProfile::exponential(std::size_t count, double tap_spacing_s,
                                                 double decay_s)
{
    if (count == 0) throw std::invalid_argument("power delay profile has no taps");
    PowerDelayProfile profile;
    double total = 0.0;
    for (std::size_t l = 0; l < count; ++l) {
        const double delay = static_cast<double>(l) * tap_spacing_s;
        const double power = std::exp(-delay / decay_s);
        profile.taps.push_back({delay, power});
        total += power;
    }
    for (auto& tap : profile.taps) tap.mean_power /= total;
    return profile;
}

void ArrayConfig::validate() const
{
    if (antennas < 1) throw std::invalid_argument("array needs at least one antenna");
    if (!(spacing_m > 0.0)) throw std::invalid_argument("antenna spacing must be positive");
}

Eigen::MatrixXd ChannelRealization::phases() const
{
    return response.unaryExpr([](std::complex<double> z) { return std::arg(z); });
}

TapSet generate_taps(const PowerDelayProfile& profile, std::uint64_t seed, std::uint64_t index)
{
    profile.validate();
    RandomStream rng(seed, index);
    TapSet taps;
    taps.reserve(profile.taps.size());
    for (const auto& tap : profile.taps) taps.push_back({rng.complex_normal(tap.mean_power), tap.delay_s});
    return taps;
}

ChannelRealization frequency_response(const TapSet& taps, const ArrayConfig& array,
                                      const std::vector<double>& directions_rad,
                                      const FrequencyGrid& grid)
{
    array.validate();
    grid.validate();
    if (directions_rad.size() != taps.size())
        throw std::invalid_argument("one departure direction per tap is required");

    ChannelRealization h{Eigen::MatrixXcd::Zero(grid.tones, array.antennas), grid};
    for (std::size_t n = 0; n < grid.tones; ++n) {
        const double w = grid.angular(n);
        const double spacing_in_wavelengths = array.spacing_m * grid.tone_hz(n) / kSpeedOfLight;
        for (std::size_t m = 0; m < array.antennas; ++m) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t l = 0; l < taps.size(); ++l) {
                const double shift = 2.0 * std::numbers::pi * static_cast<double>(m) *
                                     spacing_in_wavelengths * std::cos(directions_rad[l]);
                acc += taps[l].gain * std::polar(1.0, -w * taps[l].delay_s + shift);
            }
            h.response(n, m) = acc;
        }
    }
    return h;
}

ChannelRealization multipath_channel(const PowerDelayProfile& profile, const ArrayConfig& array,
                                     const FrequencyGrid& grid, std::uint64_t seed,
                                     std::uint64_t index)
{
    const TapSet taps = generate_taps(profile, seed, index);
    RandomStream angles(seed ^ 0xa5a5a5a5a5a5a5a5ULL, index);
    std::vector<double> directions(taps.size());
    for (auto& theta : directions) theta = angles.uniform(0.0, 2.0 * std::numbers::pi);
    return frequency_response(taps, array, directions, grid);
}

std::vector<ChannelRealization> iid_frequency_channel(const FrequencyGrid& grid, std::size_t antennas,
                                                      std::size_t rectennas, std::uint64_t seed,
                                                      std::uint64_t index)
{
    grid.validate();
    if (antennas < 1 || rectennas < 1)
        throw std::invalid_argument("need at least one antenna and one rectenna");
    RandomStream rng(seed, index);
    std::vector<ChannelRealization> out;
    out.reserve(rectennas);
    for (std::size_t u = 0; u < rectennas; ++u) {
        ChannelRealization h{Eigen::MatrixXcd(grid.tones, antennas), grid};
        for (std::size_t n = 0; n < grid.tones; ++n)
            for (std::size_t m = 0; m < antennas; ++m) h.response(n, m) = rng.complex_normal();
        out.push_back(std::move(h));
    }
    return out;
}

ChannelRealization flat_channel(double amplitude, double phase, const FrequencyGrid& grid,
                                std::size_t antennas)
{
    if (!(amplitude >= 0.0)) throw std::invalid_argument("channel amplitude must be non-negative");
    grid.validate();
    const std::complex<double> value = std::polar(amplitude, phase);
    return {Eigen::MatrixXcd::Constant(grid.tones, antennas, value), grid};
}

void write_channel(std::ostream& os, const std::vector<ChannelRealization>& channels)
{
    os << "# channel frequency response: one line per tone, (re im) per antenna\n";
    for (std::size_t u = 0; u < channels.size(); ++u) {
        if (u > 0) os << '\n';
        const auto& h = channels[u].response;
        for (Eigen::Index n = 0; n < h.rows(); ++n) {
            for (Eigen::Index m = 0; m < h.cols(); ++m) {
                if (m > 0) os << ' ';
                os << format_double(h(n, m).real()) << ' ' << format_double(h(n, m).imag());
            }
            os << '\n';
        }
    }
}

std::vector<ChannelRealization> read_channel(std::istream& is, const FrequencyGrid& grid)
{
    std::vector<std::vector<std::vector<double>>> blocks(1);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] == '#') continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            if (!blocks.back().empty()) blocks.emplace_back();
            continue;
        }
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) row.push_back(parse_double(tok));
        blocks.back().push_back(std::move(row));
    }
    if (blocks.back().empty()) blocks.pop_back();
    if (blocks.empty()) throw std::invalid_argument("channel file holds no data");

    std::vector<ChannelRealization> out;
    for (const auto& rows : blocks) {
        if (rows.size() != grid.tones)
            throw std::invalid_argument("channel file: tone count " + std::to_string(rows.size()) +
                                        " differs from grid (" + std::to_string(grid.tones) + ")");
        const std::size_t width = rows.front().size();
        if (width == 0 || width % 2 != 0) throw std::invalid_argument("channel file: odd number of columns");
        ChannelRealization h{Eigen::MatrixXcd(rows.size(), width / 2), grid};
        for (std::size_t n = 0; n < rows.size(); ++n) {
            if (rows[n].size() != width) throw std::invalid_argument("channel file: ragged rows");
            for (std::size_t m = 0; m < width / 2; ++m)
                h.response(n, m) = {rows[n][2 * m], rows[n][2 * m + 1]};
        }
        out.push_back(std::move(h));
    }
    return out;
}

}  // namespace wpt
