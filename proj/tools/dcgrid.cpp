#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dcgrid/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"DC microgrid consensus-control stability analysis and simulation"};
    app.require_subcommand(1);

    std::string scenario;
    dcgrid::cli::AnalyzeOptions analyze;
    std::string analyze_out;
    auto* a = app.add_subcommand("analyze", "Stability report for a scenario");
    a->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    a->add_option("--out", analyze_out, "Write the JSON report here");
    a->add_option("--tol", analyze.tol, "Eigenvalue zero tolerance (relative)");

    dcgrid::cli::SimulateOptions simulate;
    auto* s = app.add_subcommand("simulate", "Time-domain simulation with scripted events");
    s->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out", simulate.out, "Trace CSV path")->capture_default_str();
    s->add_option("--dt", simulate.dt, "Integration step, s");
    s->add_option("--t-end", simulate.t_end, "End time, s");

    dcgrid::cli::SweepOptions sweep;
    std::string sweep_out;
    auto* w = app.add_subcommand("sweep", "Verdict over a parameter grid");
    w->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    w->add_option("--param", sweep.param, "P, tau, b1 or b2")->required();
    w->add_option("--range", sweep.range, "lo:hi:steps")->required();
    w->add_option("--out", sweep_out, "CSV path (stdout if omitted)");
    w->add_option("--tol", sweep.tol, "Eigenvalue zero tolerance (relative)");

    dcgrid::cli::CheckOptions check;
    auto* c = app.add_subcommand("check", "Randomized checks of the load condition and the gain bound");
    c->add_option("--seed", check.seed, "RNG seed")->capture_default_str();
    c->add_option("--trials", check.trials, "Number of random configurations")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dcgrid::cli::kExitError;
    }

    if (a->parsed()) {
        if (!analyze_out.empty()) analyze.out = analyze_out;
        return dcgrid::cli::cmd_analyze(scenario, analyze, std::cout, std::cerr);
    }
    if (s->parsed()) {
        return dcgrid::cli::cmd_simulate(scenario, simulate, std::cout, std::cerr);
    }
    if (w->parsed()) {
        if (!sweep_out.empty()) sweep.out = sweep_out;
        return dcgrid::cli::cmd_sweep(scenario, sweep, std::cout, std::cerr);
    }
    return dcgrid::cli::cmd_check(check, std::cout, std::cerr);
}
