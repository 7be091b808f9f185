// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration for the command-line front end.
//
// Files hold one `key = value` pair per line; '#' starts a comment. Lists are
// comma separated and integer lists also accept inclusive ranges such as
// `1..16`. Physical quantities carry their unit in the key name.
#pragma once

#include "wpt/channel.hpp"
#include "wpt/circuit.hpp"
#include "wpt/grid.hpp"
#include "wpt/optimizer.hpp"
#include "wpt/rectenna.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wpt::cli {

/// A configuration problem tied to one key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class ChannelKind { flat, selective, multipath };

struct ExperimentConfig {
    // Scenario.
    ChannelKind channel = ChannelKind::multipath;
    std::vector<std::size_t> tones{8};
    std::vector<std::size_t> antennas{1};
    std::size_t rectennas = 1;
    std::vector<double> rectenna_weights;  // empty -> all ones
    std::vector<double> bandwidth_hz{10e6};
    std::optional<double> tone_spacing_hz;  // must equal bandwidth / tones when given
    double center_frequency_hz = 5.18e9;
    double power_w = 1e-5;                 // average received power
    double channel_amplitude = 1.0;        // flat channel gain A
    double channel_phase_rad = 0.0;
    std::size_t tap_count = 18;
    double tap_spacing_s = 40e-9;
    double tap_decay_s = 100e-9;
    double antenna_spacing_m = 0.029;

    // Rectenna and rectifier.
    RectennaParams rectenna;
    double c_out_f = 10e-12;
    bool c_out_auto = false;  // c_out_f = auto: R_L C_out equals the envelope period
    double sim_step_scale = 1.0;
    double sim_steady_tol = 1e-6;
    int sim_max_periods = 200;

    // Design.
    std::vector<std::string> strategies{"opt"};
    std::vector<double> papr_eta{1e6, 12.0, 8.0, 4.0, 2.0};
    int papr_oversampling = 8;
    double sca_epsilon = 1e-6;
    int sca_max_iterations = 100;

    // Runs.
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::size_t realization = 0;

    // Outputs.
    std::string out;             // CSV destination; empty -> stdout
    std::string waveform_out;    // optimize: waveform file of the single design
    std::string waveform_in;     // evaluate: waveform file to score
    std::string trace_out;       // simulate: trace CSV of realization 0
    std::size_t trace_decimation = 1;

    /// Cross-key checks; throws ConfigError naming the offending key.
    void validate() const;

    OptimizerOptions optimizer_options() const;
    CircuitParams circuit(const FrequencyGrid& grid) const;
    PowerDelayProfile delay_profile() const;
    FrequencyGrid grid(std::size_t tones, double bandwidth) const;
    std::vector<double> weights() const;
};

std::string_view to_string(ChannelKind k);

/// Applies one `key = value` assignment.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses a whole file's worth of assignments on top of `cfg`.
void parse_config(ExperimentConfig& cfg, std::istream& is);

/// Reads `path`; a missing file is reported against the pseudo-key "config".
void load_config_file(ExperimentConfig& cfg, const std::string& path);

/// Applies "key=value" overrides given on the command line.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

/// Every key accepted by apply_setting, in documentation order.
const std::vector<std::string>& config_keys();

/// Draws the rectenna channels of one realization on `grid`; index
/// `realization` selects the random stream. Multipath taps depend only on
/// (seed, realization), so the same realization seen through different grids
/// is the same physical channel.
std::vector<ChannelRealization> draw_channels(const ExperimentConfig& cfg, const FrequencyGrid& grid,
                                              std::size_t antennas, std::size_t realization);

}  // namespace wpt::cli
