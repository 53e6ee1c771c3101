#include "commands.hpp"
#include "config.hpp"

#include <natanzon/errors.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace natanzon::cli;

    CLI::App app{"Confluent potentials with position-dependent mass: tables, spectra and oracle checks"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    bool strict = false;
    for (const auto& name : kCommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output_dir in the config)");
        sub->add_flag("--strict", strict, "exit with 4 when acceptance thresholds are violated");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const natanzon::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    CommandOptions opt;
    opt.out_dir = out_dir.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(out_dir);
    opt.strict = strict;
    return run_command(command, cfg, opt, std::cout, std::cerr);
}
