#include "pmfix/builtins.hpp"
#include "pmfix/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"fixed-point toolkit for ordered partial metric spaces"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory (overrides the scenario)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = run->add_option("--seed", seed_value, "override the scenario seed");

    auto* list = app.add_subcommand("list", "list bundled building blocks");

    std::string schema_command;
    auto* schema = app.add_subcommand("schema", "print the payload schema for a command");
    schema->add_option("command", schema_command, "scenario command")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    if (run->parsed()) {
        if (seed_opt->count() > 0) seed = seed_value;
        return pmfix::run_scenario_file(scenario_path, out_dir, seed);
    }
    if (list->parsed()) {
        std::cout << pmfix::builtins::list_text();
        return 0;
    }
    if (schema->parsed()) {
        try {
            std::cout << pmfix::command_schema(schema_command).dump(2) << "\n";
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        return 0;
    }
    return 1;
}
