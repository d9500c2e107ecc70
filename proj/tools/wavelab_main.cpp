#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "wavelab/experiment.hpp"
#include "wavelab/transform_io.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    int jobs = -1;
};

void apply_overrides(wavelab::ExperimentConfig& cfg, const CommonOpts& opts) {
    // precedence: command line > environment > config file
    if (const char* env = std::getenv("WAVELAB_SEED"); env != nullptr && *env != '\0')
        cfg.seed = std::strtoull(env, nullptr, 10);
    if (const char* env = std::getenv("WAVELAB_JOBS"); env != nullptr && *env != '\0')
        cfg.jobs = static_cast<int>(std::strtol(env, nullptr, 10));
    if (opts.seed_set) cfg.seed = opts.seed;
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    if (opts.jobs >= 0) cfg.jobs = opts.jobs;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("config", opts.config_path, "experiment config (TOML)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "override the run seed")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--out", opts.out_dir, "override the output directory");
    cmd->add_option("--jobs", opts.jobs, "worker threads (0 = hardware default)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavelab: two-stage spectrally-compressed waveform simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts, val_opts, train_opts, shape_opts;
    CLI::App* cmd_run = app.add_subcommand("run", "run an experiment config");
    add_common(cmd_run, run_opts);
    CLI::App* cmd_validate = app.add_subcommand("validate", "check a config and report issues");
    add_common(cmd_validate, val_opts);
    CLI::App* cmd_train =
        app.add_subcommand("train", "train a compressing transform pair from a config");
    add_common(cmd_train, train_opts);
    CLI::App* cmd_shape =
        app.add_subcommand("shape", "emit per-subcarrier shaping spectra of a trained pair");
    add_common(cmd_shape, shape_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_validate->parsed()) {
            auto cfg = wavelab::load_experiment(val_opts.config_path);
            apply_overrides(cfg, val_opts);
            const auto issues = wavelab::validate_experiment(cfg);
            for (const auto& i : issues) std::cout << "invalid: " << i << "\n";
            if (issues.empty()) std::cout << "config ok\n";
            return issues.empty() ? 0 : 1;
        }
        CommonOpts* opts = cmd_run->parsed() ? &run_opts
                           : cmd_train->parsed() ? &train_opts
                                                 : &shape_opts;
        auto cfg = wavelab::load_experiment(opts->config_path);
        apply_overrides(cfg, *opts);
        if (cmd_train->parsed()) cfg.experiment = wavelab::ExperimentKind::train;
        if (cmd_shape->parsed()) cfg.experiment = wavelab::ExperimentKind::shape;
        const auto written = wavelab::run_experiment(cfg, std::cout);
        for (const auto& w : written) std::cout << "wrote " << w << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
