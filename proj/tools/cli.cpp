// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

namespace wpt::cli {

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("-c,--config", c.config_path, "key = value configuration file");
    sub->add_option("--set", c.overrides, "override one key, e.g. --set tones=1..8")->take_all();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Multisine multi-antenna waveform design for far-field wireless power transfer", "wpt"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    std::size_t trials = 0, workers = 0;
    std::string out_path;
    auto* seed_opt = app.add_option("--seed", seed, "random seed");
    auto* trials_opt = app.add_option("--trials", trials, "channel realizations or Monte Carlo trials");
    auto* workers_opt = app.add_option("--workers", workers, "worker threads (0 = all cores)");
    auto* out_opt = app.add_option("--out", out_path, "CSV destination (default stdout)");

    Common common;
    std::string waveform_path, trace_path;

    auto* optimize = app.add_subcommand("optimize", "design waveforms for one channel realization");
    add_common(optimize, common);
    optimize->add_option("--waveform", waveform_path, "write the designed waveform here");

    auto* evaluate = app.add_subcommand("evaluate", "ensemble z_DC of strategies, or score a waveform file");
    add_common(evaluate, common);
    evaluate->add_option("--waveform", waveform_path, "waveform file to score");

    auto* papr_cmd = app.add_subcommand("papr", "PAPR-constrained design over a sweep of bounds");
    add_common(papr_cmd, common);

    auto* scaling_cmd = app.add_subcommand("scaling", "closed-form scaling laws against Monte Carlo");
    add_common(scaling_cmd, common);

    auto* simulate_cmd = app.add_subcommand("simulate", "rectifier circuit simulation of designed waveforms");
    add_common(simulate_cmd, common);
    simulate_cmd->add_option("--trace", trace_path, "write realization-0 traces here");

    std::string preset_name;
    bool list = false;
    auto* preset_cmd = app.add_subcommand("preset", "run a named experiment preset");
    preset_cmd->add_option("name", preset_name, "preset name");
    preset_cmd->add_flag("--list", list, "list presets");
    add_common(preset_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        ExperimentConfig cfg;
        const Preset* preset = nullptr;
        if (preset_cmd->parsed()) {
            if (list) {
                for (const auto& p : presets()) out << p.name << "  " << p.description << '\n';
                return exit_ok;
            }
            if (preset_name.empty()) throw ConfigError("preset", "a preset name is required (see --list)");
            preset = &find_preset(preset_name);
            preset->defaults(cfg);
        }
        if (!common.config_path.empty()) load_config_file(cfg, common.config_path);
        for (const auto& o : common.overrides) apply_override(cfg, o);
        if (seed_opt->count()) cfg.seed = seed;
        if (trials_opt->count()) {
            if (trials == 0) throw ConfigError("trials", "at least one trial is required");
            cfg.trials = trials;
        }
        if (workers_opt->count()) cfg.workers = workers;
        if (out_opt->count()) cfg.out = out_path;
        if (!waveform_path.empty()) {
            if (optimize->parsed()) cfg.waveform_out = waveform_path;
            else cfg.waveform_in = waveform_path;
        }
        if (!trace_path.empty()) cfg.trace_out = trace_path;

        // Buffer the whole CSV so a failing run leaves no partial file.
        std::ostringstream csv;
        if (preset) {
            csv << preset->header << '\n';
            preset->run(cfg, csv);
        } else if (optimize->parsed()) {
            cmd_optimize(cfg, csv);
        } else if (evaluate->parsed()) {
            cmd_evaluate(cfg, csv);
        } else if (papr_cmd->parsed()) {
            cmd_papr(cfg, csv);
        } else if (scaling_cmd->parsed()) {
            cmd_scaling(cfg, csv);
        } else {
            cmd_simulate(cfg, csv);
        }

        if (cfg.out.empty()) {
            out << csv.str();
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) throw ConfigError("out", "cannot write '" + cfg.out + "'");
            file << csv.str();
        }
        return exit_ok;
    } catch (...) {
        return report_failure(err);
    }
}

}  // namespace wpt::cli
