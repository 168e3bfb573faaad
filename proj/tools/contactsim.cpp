// contactsim: run contact-mechanics scenarios.
//
//   contactsim run <config.json> [--seed N] [--tol-scale S]
//   contactsim list-systems
//
// Exit status: 0 all enabled checks pass, 1 a check failed, 2 configuration error.

#include "contact/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr int exit_pass = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_config_error = 2;

std::string brief(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

int run(const std::string& path, const contact::scenario::RunOptions& options)
{
    using namespace contact::scenario;
    ScenarioResult result;
    ScenarioConfig cfg;
    try {
        cfg = load_config(path);
        result = run_scenario(cfg, options);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << path << ": " << e.what() << "\n";
        return exit_config_error;
    }

    try {
        if (!cfg.output.csv.empty()) {
            write_atomically(cfg.output.csv, result.csv());
        }
        if (!cfg.output.report.empty()) {
            write_atomically(cfg.output.report, result.report.dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_check_failed;
    }

    for (const auto& c : result.report["checks"]) {
        std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>();
        if (c.contains("value")) {
            std::cout << "  value=" << (c["value"].is_null() ? std::string("nan") : brief(c["value"].get<double>()))
                      << " tol=" << brief(c["tolerance"].get<double>());
        }
        std::cout << "\n";
    }
    std::cout << (result.passed ? "all checks passed" : "some checks failed") << "\n";
    return result.passed ? exit_pass : exit_check_failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Contact Hamiltonian and Lagrangian scenario runner"};
    app.require_subcommand(1);

    std::string config;
    contact::scenario::RunOptions options;
    std::uint64_t seed = 0;
    CLI::App* run_cmd = app.add_subcommand("run", "run a scenario file");
    run_cmd->add_option("config", config, "scenario JSON")->required();
    CLI::Option* seed_opt = run_cmd->add_option("--seed", seed, "override the sample seed");
    run_cmd->add_option("--tol-scale", options.tol_scale, "multiply every tolerance")
        ->check(CLI::PositiveNumber);

    CLI::App* list_cmd = app.add_subcommand("list-systems", "print the builtin systems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_config_error;
    }

    if (list_cmd->parsed()) {
        std::cout << contact::scenario::catalog_text();
        return exit_pass;
    }
    if (seed_opt->count() > 0) {
        options.seed = seed;
    }
    try {
        return run(config, options);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_check_failed;
    }
}
