#include <iostream>

#include <CLI11.hpp>

#include "grwlab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"grwlab: GRW collapse-dynamics laboratory"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "list available scenarios");

    auto* run = app.add_subcommand("run", "run a scenario from a config file");
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool scaled = false, si = false;
    run->add_option("config", config_path, "config file (JSON)")->required();
    auto* seed_opt = run->add_option("--seed", seed, "override the master seed");
    auto* out_opt = run->add_option("--out", out_dir, "override the output directory");
    auto* scaled_flag = run->add_flag("--scaled", scaled, "scaled units (hbar = m = sigma = 1)");
    auto* si_flag = run->add_flag("--si", si, "SI units with GRW's lambda and sigma");
    scaled_flag->excludes(si_flag);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (list->parsed()) {
        std::cout << grw::cli::list_scenarios();
        return 0;
    }

    grw::cli::Overrides overrides;
    if (seed_opt->count() > 0) overrides.seed = seed;
    if (out_opt->count() > 0) overrides.output_dir = out_dir;
    if (scaled) overrides.units = grw::cli::UnitMode::Scaled;
    if (si) overrides.units = grw::cli::UnitMode::SI;
    return grw::cli::run(config_path, overrides, std::cout, std::cerr);
}
