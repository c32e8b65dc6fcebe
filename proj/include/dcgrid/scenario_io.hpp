#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "dcgrid/simulator.hpp"
#include "dcgrid/stability.hpp"

namespace dcgrid {

struct AnalysisSettings {
    double eigen_tol = kSpectrumTolerance;
    double inertia_tol = kInertiaTolerance;

    friend bool operator==(const AnalysisSettings&, const AnalysisSettings&) = default;
};

/// In-memory form of a scenario document.
///
/// Layout (DG and link indices are 1-based in the file):
///   network  {n, r[], c[], k[], g[], v_ref, load_power}
///   comm     {edges: [{i, j, w}]} or {matrix: [[...]]}
///   control  {b1, b2, tau, delay_mode?, distributed_enabled?}
///   sim      {t_end, dt, decimation, initial?, events[]}
///   analysis {eigen_tol?, inertia_tol?}
struct ScenarioFile {
    std::string name;
    std::string description;
    Scenario scenario;
    AnalysisSettings analysis;

    friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

/// Throws Error{Schema} with the offending field path, e.g. "network.r: ...".
[[nodiscard]] ScenarioFile parse_scenario(const nlohmann::json& doc);
[[nodiscard]] ScenarioFile load_scenario(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json to_json(const ScenarioFile& file);

/// Complex eigenvalues serialize as {re, im, theta, magnitude}; an infinite
/// tau_max as the string "inf".
[[nodiscard]] nlohmann::json to_json(const StabilityReport& report);

/// Final u_L, final current ratios i_i/k_i, outcome class.
[[nodiscard]] nlohmann::json summary_json(const SimulationTrace& trace);

[[nodiscard]] nlohmann::json events_json(const SimulationTrace& trace);

}  // namespace dcgrid
