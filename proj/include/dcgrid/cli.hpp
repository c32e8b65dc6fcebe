#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "dcgrid/stability.hpp"
#include "dcgrid/sweep.hpp"

namespace dcgrid::cli {

inline constexpr int kExitCertified = 0;
inline constexpr int kExitUncertified = 1;
inline constexpr int kExitUnstable = 2;
inline constexpr int kExitError = 3;

[[nodiscard]] int exit_code(Verdict verdict) noexcept;

struct AnalyzeOptions {
    std::optional<std::filesystem::path> out;
    std::optional<double> tol;
};

/// Prints a human-readable summary to `out` and the JSON report to --out (or to
/// `out` after the summary when no file is given).
int cmd_analyze(const std::filesystem::path& scenario, const AnalyzeOptions& options,
                std::ostream& out, std::ostream& err);

struct SimulateOptions {
    std::filesystem::path out = "trace.csv";
    std::optional<double> dt;
    std::optional<double> t_end;
};

/// Writes <out> (CSV), <stem>.events.json and <stem>.summary.json, prints the summary.
/// Exit 0 for converged/running-stable, 2 for diverged/infeasible, 3 on error.
int cmd_simulate(const std::filesystem::path& scenario, const SimulateOptions& options,
                 std::ostream& out, std::ostream& err);

struct SweepOptions {
    std::string param;
    std::string range;
    std::optional<std::filesystem::path> out;
    std::optional<double> tol;
};

int cmd_sweep(const std::filesystem::path& scenario, const SweepOptions& options,
              std::ostream& out, std::ostream& err);

struct CheckOptions {
    unsigned long long seed = 1;
    std::size_t trials = 500;
};

/// Randomized load-condition equivalence and gain-bound soundness checks.
/// Exit 0 when no counterexample is found, 2 otherwise.
int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err);

}  // namespace dcgrid::cli
