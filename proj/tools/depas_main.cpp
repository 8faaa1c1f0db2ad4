#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "depas/metrics.hpp"
#include "depas/scenario.hpp"
#include "depas/simulation.hpp"
#include "depas/theorems.hpp"

namespace {

struct CommonOptions {
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> sample_period;
    std::string out_path;
};

depas::Scenario resolve_scenario(const CommonOptions& options) {
    depas::Scenario scenario = options.scenario_path.empty()
                                   ? depas::Scenario::default_experiment()
                                   : depas::load_scenario(options.scenario_path);
    if (options.seed) {
        scenario.run.seed = *options.seed;
    }
    if (options.sample_period) {
        scenario.run.sample_period = *options.sample_period;
    }
    scenario.validate();
    return scenario;
}

int write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file '" << out_path << "'\n";
        return 1;
    }
    out << content;
    return 0;
}

void add_common_flags(CLI::App* cmd, CommonOptions& options, bool with_out) {
    cmd->add_option("--scenario", options.scenario_path, "Scenario file (omit for the built-in default)");
    cmd->add_option("--seed", options.seed, "Override the scenario seed");
    cmd->add_option("--sample-period", options.sample_period, "Override the sample period (seconds)");
    if (with_out) {
        cmd->add_option("--out", options.out_path, "Output CSV path (default: stdout)");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized probabilistic auto-scaling simulator"};
    app.require_subcommand(1);

    CommonOptions options;
    int runs = 8;

    auto* run_cmd = app.add_subcommand("run", "Run one scenario and emit plot-ready CSV");
    add_common_flags(run_cmd, options, true);

    auto* aggregate_cmd =
        app.add_subcommand("aggregate", "Run R seeded scenarios and emit mean/std CSV");
    add_common_flags(aggregate_cmd, options, true);
    aggregate_cmd->add_option("--runs", runs, "Number of independent runs")->check(CLI::PositiveNumber);

    auto* validate_cmd = app.add_subcommand("validate", "Parse a scenario and print the resolved config");
    add_common_flags(validate_cmd, options, false);

    auto* theorems_cmd =
        app.add_subcommand("theorems", "Run the scaling-formula verification suite");
    std::uint64_t theorem_seed = 1;
    theorems_cmd->add_option("--seed", theorem_seed, "Seed for the randomized checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto scenario = resolve_scenario(options);
            depas::Simulation sim(scenario, scenario.run.seed);
            sim.run();
            const auto& summary = sim.summary();
            std::cerr << "run: seed " << scenario.run.seed << ", issued " << summary.issued
                      << ", completed " << summary.completed << ", rejected " << summary.rejected
                      << ", final workers " << sim.live_worker_count() << "\n";
            return write_output(options.out_path, depas::csv_string(scenario, sim.samples()));
        }
        if (aggregate_cmd->parsed()) {
            const auto scenario = resolve_scenario(options);
            const auto aggregate = depas::aggregate_runs(scenario, runs, scenario.run.seed);
            std::cerr << "aggregate: " << runs << " runs, seeds " << scenario.run.seed << ".."
                      << scenario.run.seed + static_cast<std::uint64_t>(runs) - 1 << "\n";
            return write_output(options.out_path, depas::aggregate_csv_string(aggregate));
        }
        if (validate_cmd->parsed()) {
            const auto scenario = resolve_scenario(options);
            std::cout << depas::describe_scenario(scenario);
            return 0;
        }
        if (theorems_cmd->parsed()) {
            const auto results = depas::run_theorem_checks(theorem_seed);
            for (const auto& result : results) {
                std::cout << (result.pass ? "pass" : "FAIL") << "  " << result.name << ": expected "
                          << result.expected << ", observed " << result.observed << " (tolerance "
                          << result.tolerance << ") -- " << result.note << "\n";
            }
            return depas::all_pass(results) ? 0 : 2;
        }
    } catch (const depas::ScenarioError& error) {
        std::cerr << "scenario error: " << error.what() << "\n";
        return 1;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
