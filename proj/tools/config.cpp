// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include "wpt/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

namespace wpt::cli {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        parts.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

double number(std::string_view key, std::string_view text)
{
    try {
        const double v = parse_double(trim(text));
        if (!std::isfinite(v)) throw std::invalid_argument("");
        return v;
    } catch (const std::invalid_argument&) {
        throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
    }
}

double positive(std::string_view key, std::string_view text)
{
    const double v = number(key, text);
    if (!(v > 0.0)) throw ConfigError(std::string(key), "must be positive");
    return v;
}

std::uint64_t integer(std::string_view key, std::string_view text)
{
    text = trim(text);
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ConfigError(std::string(key), "expected a non-negative integer, got '" + std::string(text) + "'");
    return v;
}

std::size_t count(std::string_view key, std::string_view text)
{
    const auto v = integer(key, text);
    if (v == 0) throw ConfigError(std::string(key), "must be at least 1");
    return static_cast<std::size_t>(v);
}

std::vector<std::size_t> count_list(std::string_view key, std::string_view text)
{
    std::vector<std::size_t> out;
    for (auto item : split_list(text)) {
        const auto dots = item.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(count(key, item));
            continue;
        }
        const std::size_t lo = count(key, item.substr(0, dots));
        const std::size_t hi = count(key, item.substr(dots + 2));
        if (hi < lo) throw ConfigError(std::string(key), "empty range '" + std::string(item) + "'");
        for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    }
    return out;
}

std::vector<double> positive_list(std::string_view key, std::string_view text)
{
    std::vector<double> out;
    for (auto item : split_list(text)) out.push_back(positive(key, item));
    return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;

const std::vector<std::pair<std::string, Setter>>& setters()
{
    static const std::vector<std::pair<std::string, Setter>> table{
        {"channel",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             v = trim(v);
             if (v == "flat") c.channel = ChannelKind::flat;
             else if (v == "selective") c.channel = ChannelKind::selective;
             else if (v == "multipath") c.channel = ChannelKind::multipath;
             else throw ConfigError(std::string(k), "expected flat, selective or multipath");
         }},
        {"tones", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.tones = count_list(k, v); }},
        {"antennas",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.antennas = count_list(k, v); }},
        {"rectennas", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.rectennas = count(k, v); }},
        {"rectenna_weights",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.rectenna_weights = positive_list(k, v); }},
        {"bandwidth_hz",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.bandwidth_hz = positive_list(k, v); }},
        {"tone_spacing_hz",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.tone_spacing_hz = positive(k, v); }},
        {"center_frequency_hz",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.center_frequency_hz = positive(k, v); }},
        {"power_w", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.power_w = positive(k, v); }},
        {"power_dbm",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             c.power_w = 1e-3 * std::pow(10.0, number(k, v) / 10.0);
         }},
        {"channel_amplitude",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.channel_amplitude = positive(k, v); }},
        {"channel_phase_rad",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.channel_phase_rad = number(k, v); }},
        {"tap_count", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.tap_count = count(k, v); }},
        {"tap_spacing_s",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.tap_spacing_s = positive(k, v); }},
        {"tap_decay_s",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.tap_decay_s = positive(k, v); }},
        {"antenna_spacing_m",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.antenna_spacing_m = positive(k, v); }},
        {"taylor_order",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             const auto o = integer(k, v);
             if (o != 2 && o != 4 && o != 6) throw ConfigError(std::string(k), "must be 2, 4 or 6");
             c.rectenna.order = static_cast<int>(o);
         }},
        {"saturation_current_a",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.rectenna.diode.i_s = positive(k, v); }},
        {"ideality_factor",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.rectenna.diode.n = positive(k, v); }},
        {"thermal_voltage_v",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.rectenna.diode.v_t = positive(k, v); }},
        {"antenna_resistance_ohm",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.rectenna.diode.r_ant = positive(k, v); }},
        {"load_resistance_ohm",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.rectenna.diode.r_load = positive(k, v); }},
        {"c_out_f",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             c.c_out_auto = trim(v) == "auto";
             if (!c.c_out_auto) c.c_out_f = positive(k, v);
         }},
        {"sim_step_scale",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.sim_step_scale = positive(k, v); }},
        {"sim_steady_tol",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.sim_steady_tol = positive(k, v); }},
        {"sim_max_periods",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             c.sim_max_periods = static_cast<int>(std::min<std::size_t>(count(k, v), 1000000));
         }},
        {"strategies",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             c.strategies.clear();
             for (auto s : split_list(v)) {
                 if (s.empty()) throw ConfigError(std::string(k), "empty strategy name");
                 c.strategies.emplace_back(s);
             }
         }},
        {"papr_eta",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             c.papr_eta = positive_list(k, v);
             for (double e : c.papr_eta)
                 if (e < 2.0) throw ConfigError(std::string(k), "PAPR bounds below 2 cannot be met");
         }},
        {"papr_oversampling",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             c.papr_oversampling = static_cast<int>(std::min<std::size_t>(count(k, v), 1024));
         }},
        {"sca_epsilon",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.sca_epsilon = positive(k, v); }},
        {"sca_max_iterations",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             c.sca_max_iterations = static_cast<int>(std::min<std::size_t>(count(k, v), 100000));
         }},
        {"trials",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             c.trials = static_cast<std::size_t>(integer(k, v));
             if (c.trials == 0) throw ConfigError(std::string(k), "at least one trial is required");
         }},
        {"seed", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.seed = integer(k, v); }},
        {"workers",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             c.workers = static_cast<std::size_t>(integer(k, v));
         }},
        {"realization",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             c.realization = static_cast<std::size_t>(integer(k, v));
         }},
        {"out", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.out = trim(v); }},
        {"waveform_out", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.waveform_out = trim(v); }},
        {"waveform_in", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.waveform_in = trim(v); }},
        {"trace_out", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.trace_out = trim(v); }},
        {"trace_decimation",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.trace_decimation = count(k, v); }},
    };
    return table;
}

}  // namespace

std::string_view to_string(ChannelKind k)
{
    switch (k) {
    case ChannelKind::flat: return "flat";
    case ChannelKind::selective: return "selective";
    case ChannelKind::multipath: return "multipath";
    }
    return "?";
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, setter] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value)
{
    key = trim(key);
    for (const auto& [name, setter] : setters()) {
        if (name == key) {
            setter(cfg, key, value);
            return;
        }
    }
    throw ConfigError(std::string(key), "unknown key");
}

void parse_config(ExperimentConfig& cfg, std::istream& is)
{
    std::string line;
    std::set<std::string> seen;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(view), "line " + std::to_string(lineno) + " has no '='");
        const std::string key(trim(view.substr(0, eq)));
        if (!seen.insert(key).second) throw ConfigError(key, "given twice");
        if (key == "power_w" && seen.count("power_dbm")) throw ConfigError(key, "conflicts with power_dbm");
        if (key == "power_dbm" && seen.count("power_w")) throw ConfigError(key, "conflicts with power_w");
        apply_setting(cfg, key, view.substr(eq + 1));
    }
}

void load_config_file(ExperimentConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    parse_config(cfg, in);
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError(std::string(trim(assignment)), "override needs the form key=value");
    apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void ExperimentConfig::validate() const
{
    if (tones.empty()) throw ConfigError("tones", "no values");
    if (antennas.empty()) throw ConfigError("antennas", "no values");
    if (bandwidth_hz.empty()) throw ConfigError("bandwidth_hz", "no values");
    if (strategies.empty()) throw ConfigError("strategies", "no values");
    const auto& known = strategy_names();
    for (const auto& s : strategies) {
        if (std::find(known.begin(), known.end(), s) == known.end() && s != "up-matched" && s != "ass-multi")
            throw ConfigError("strategies", "unknown strategy '" + s + "'");
    }
    if (tone_spacing_hz) {
        for (double b : bandwidth_hz)
            for (std::size_t n : tones) {
                const double spacing = b / static_cast<double>(n);
                if (std::abs(spacing - *tone_spacing_hz) > 1e-9 * spacing)
                    throw ConfigError("tone_spacing_hz", "must equal bandwidth_hz / tones (" +
                                                              format_double(spacing) + " for tones=" +
                                                              std::to_string(n) + ")");
            }
    }
    for (double b : bandwidth_hz)
        if (!(b < center_frequency_hz))
            throw ConfigError("bandwidth_hz", "must be smaller than center_frequency_hz");
    if (!rectenna_weights.empty() && rectenna_weights.size() != rectennas)
        throw ConfigError("rectenna_weights", "needs one weight per rectenna");
    if (rectennas > 1) {
        for (const auto& s : strategies)
            if (s != "up" && s != "opt-multi" && s != "ass-multi")
                throw ConfigError("strategies", "'" + s + "' designs for one rectenna; with rectennas > 1 use "
                                                      "up, opt-multi or ass-multi");
    }
}

OptimizerOptions ExperimentConfig::optimizer_options() const
{
    OptimizerOptions o;
    o.epsilon = sca_epsilon;
    o.max_iterations = sca_max_iterations;
    o.oversampling = papr_oversampling;
    return o;
}

CircuitParams ExperimentConfig::circuit(const FrequencyGrid& g) const
{
    CircuitParams c;
    c.diode = rectenna.diode;
    c.c_out = c_out_auto ? g.period_s() / c.load() : c_out_f;
    return c;
}

PowerDelayProfile ExperimentConfig::delay_profile() const
{
    return PowerDelayProfile::exponential(tap_count, tap_spacing_s, tap_decay_s);
}

FrequencyGrid ExperimentConfig::grid(std::size_t n, double bandwidth) const
{
    return FrequencyGrid::centered(n, center_frequency_hz, bandwidth);
}

std::vector<double> ExperimentConfig::weights() const
{
    if (!rectenna_weights.empty()) return rectenna_weights;
    return std::vector<double>(rectennas, 1.0);
}

std::vector<ChannelRealization> draw_channels(const ExperimentConfig& cfg, const FrequencyGrid& g,
                                              std::size_t antennas, std::size_t realization)
{
    std::vector<ChannelRealization> out;
    switch (cfg.channel) {
    case ChannelKind::flat:
        for (std::size_t u = 0; u < cfg.rectennas; ++u)
            out.push_back(flat_channel(cfg.channel_amplitude, cfg.channel_phase_rad, g, antennas));
        break;
    case ChannelKind::selective:
        out = iid_frequency_channel(g, antennas, cfg.rectennas, cfg.seed, realization);
        break;
    case ChannelKind::multipath: {
        ArrayConfig array;
        array.antennas = antennas;
        array.spacing_m = cfg.antenna_spacing_m;
        const PowerDelayProfile profile = cfg.delay_profile();
        for (std::size_t u = 0; u < cfg.rectennas; ++u)
            out.push_back(multipath_channel(profile, array, g, cfg.seed, realization * cfg.rectennas + u));
        break;
    }
    }
    return out;
}

}  // namespace wpt::cli
