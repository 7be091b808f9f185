// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace wpt::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_solver = 3,
    exit_simulation = 4,
};

// Each command writes one CSV (header row, fixed columns) to `out`.
void cmd_optimize(const ExperimentConfig& cfg, std::ostream& out);
void cmd_evaluate(const ExperimentConfig& cfg, std::ostream& out);
void cmd_papr(const ExperimentConfig& cfg, std::ostream& out);
void cmd_scaling(const ExperimentConfig& cfg, std::ostream& out);
void cmd_simulate(const ExperimentConfig& cfg, std::ostream& out);

struct Preset {
    std::string name;
    std::string header;  // first line of the output, "# parallels ..."
    std::string description;
    void (*defaults)(ExperimentConfig&);
    void (*run)(const ExperimentConfig&, std::ostream&);
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);  // throws ConfigError("preset")

/// Maps the exception currently being handled to an exit code and prints a
/// one-line diagnostic to `err`.
int report_failure(std::ostream& err);

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wpt::cli
