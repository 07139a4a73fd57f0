#include "navseg/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"navseg: navigation segment partitioning and session simulation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::vector<std::string> overrides;
    navseg::RunOptions options;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--jobs", options.jobs, "worker threads for independent sweep points")
        ->check(CLI::PositiveNumber);
    app.add_option("--set", overrides, "override a config field, e.g. --set sweep.mu=[0.01,0.1]")
        ->allow_extra_args(false);
    app.add_flag("--quiet", options.quiet, "suppress progress output");

    const char* commands[][2] = {
        {"partition", "optimal and baseline partitions per method and sweep point"},
        {"simulate", "simulated navigation sessions per method and sweep point"},
        {"validate-alpha", "empirical versus modelled segment request counts"},
        {"oracle", "solver versus exhaustive search on random small instances"},
        {"gen-rates", "write the configured rate tables as CSV"},
        {"gen-popularity", "write the configured view popularity as CSV"},
    };
    for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? navseg::exit_ok : navseg::exit_validation;
    }

    navseg::ExperimentConfig config;
    try {
        nlohmann::json tree = config_path.empty() ? nlohmann::json::object() : navseg::load_config_file(config_path);
        for (const std::string& o : overrides) navseg::apply_override(tree, o);
        if (seed) tree["seed"] = *seed;
        if (out_dir) tree["output_dir"] = *out_dir;
        config = navseg::ExperimentConfig::from_json(tree);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return navseg::exit_validation;
    }
    return navseg::run_command(app.get_subcommands().front()->get_name(), config, options);
}
