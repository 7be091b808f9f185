// SPDX-License-Identifier: Apache-2.0

#include "wpt/waveform.hpp"

#include "wpt/format.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace wpt {

Waveform::Waveform(Eigen::MatrixXd s, Eigen::MatrixXd phi, FrequencyGrid g)
    : amplitude(std::move(s)), phase(std::move(phi)), grid(g)
{
    if (amplitude.rows() != phase.rows() || amplitude.cols() != phase.cols())
        throw std::invalid_argument("amplitude and phase matrices differ in shape");
    if (static_cast<std::size_t>(amplitude.rows()) != grid.tones)
        throw std::invalid_argument("waveform rows do not match the tone count");
    if ((amplitude.array() < 0.0).any()) throw std::invalid_argument("negative amplitude");
}

Eigen::MatrixXcd Waveform::weights() const
{
    Eigen::MatrixXcd w(amplitude.rows(), amplitude.cols());
    for (Eigen::Index n = 0; n < w.rows(); ++n)
        for (Eigen::Index m = 0; m < w.cols(); ++m)
            w(n, m) = std::polar(amplitude(n, m), phase(n, m));
    return w;
}

void write_waveform(std::ostream& os, const Waveform& w, double power_budget)
{
    os << "# multisine waveform: one row per tone, (amplitude phase_rad) per antenna\n";
    os << "tones " << w.tones() << '\n';
    os << "antennas " << w.antennas() << '\n';
    os << "f0_hz " << format_double(w.grid.f0_hz) << '\n';
    os << "spacing_hz " << format_double(w.grid.spacing_hz) << '\n';
    os << "power_w " << format_double(power_budget) << '\n';
    for (std::size_t n = 0; n < w.tones(); ++n) {
        for (std::size_t m = 0; m < w.antennas(); ++m) {
            if (m > 0) os << ' ';
            os << format_double(w.amplitude(n, m)) << ' ' << format_double(w.phase(n, m));
        }
        os << '\n';
    }
}

WaveformFile read_waveform(std::istream& is)
{
    std::map<std::string, std::string> header;
    std::vector<std::vector<double>> rows;
    const char* keys[] = {"tones", "antennas", "f0_hz", "spacing_hz", "power_w"};
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string first;
        ls >> first;
        if (header.size() < 5) {
            bool known = false;
            for (const char* k : keys) known = known || first == k;
            if (!known) throw std::invalid_argument("waveform file: unexpected header key '" + first + "'");
            std::string value;
            ls >> value;
            header[first] = value;
            continue;
        }
        std::vector<double> row{parse_double(first)};
        std::string tok;
        while (ls >> tok) row.push_back(parse_double(tok));
        rows.push_back(std::move(row));
    }
    for (const char* k : keys)
        if (!header.count(k)) throw std::invalid_argument(std::string("waveform file: missing ") + k);

    const auto tones = static_cast<std::size_t>(std::stoul(header["tones"]));
    const auto antennas = static_cast<std::size_t>(std::stoul(header["antennas"]));
    if (rows.size() != tones) throw std::invalid_argument("waveform file: row count differs from tones");

    FrequencyGrid grid{tones, parse_double(header["f0_hz"]), parse_double(header["spacing_hz"])};
    grid.validate();
    Eigen::MatrixXd s(tones, antennas), phi(tones, antennas);
    for (std::size_t n = 0; n < tones; ++n) {
        if (rows[n].size() != 2 * antennas)
            throw std::invalid_argument("waveform file: row " + std::to_string(n) + " has wrong width");
        for (std::size_t m = 0; m < antennas; ++m) {
            s(n, m) = rows[n][2 * m];
            phi(n, m) = rows[n][2 * m + 1];
        }
    }
    return {Waveform(std::move(s), std::move(phi), grid), parse_double(header["power_w"])};
}

}  // namespace wpt
