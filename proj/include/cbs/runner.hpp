#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cbs/coherence_analytics.hpp"
#include "cbs/config.hpp"
#include "cbs/transport.hpp"

namespace cbs {

std::string version_string();

struct RunResult {
    RunConfig config;
    ContrastEstimate estimate;
    Measurement enhancement;
    std::optional<CoherenceBudget> budget;  // absent for static atoms
    std::vector<WalkDispersion> walk;
    double wall_seconds = 0.0;
};

RunResult run_single(RunConfig const& config);

struct EmittedFiles {
    std::filesystem::path orders_csv;
    std::filesystem::path angular_csv;
    std::filesystem::path summary_json;
    std::filesystem::path walk_csv;  // empty when no walk statistics were requested
};

/// Writes orders.csv, angular.csv, summary.json (and frequency_walk.csv) under dir.
EmittedFiles emit_results(RunResult const& result, std::filesystem::path const& dir);

std::string orders_csv(RunResult const& result);
std::string angular_csv(RunResult const& result);
std::string walk_csv(RunResult const& result);
nlohmann::json summary_json(RunResult const& result);
nlohmann::json budget_json(CoherenceBudget const& budget);

struct SweepPoint {
    double axis_value = 0.0;
    std::optional<RunResult> result;
    std::string error;  // set when the point failed
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepPoint> points;
};

/// Runs every axis value; a failing point is recorded and the sweep continues.
SweepResult run_sweep(SweepSpec const& spec);

/// Writes sweep.csv, sweep.json and one point_NNN directory per value.
std::vector<std::filesystem::path> emit_sweep(SweepResult const& sweep, std::filesystem::path const& dir);
std::string sweep_csv(SweepResult const& sweep);

/// Shortest round-trip text for a double; "nan" for NaN.
std::string format_number(double value);

}  // namespace cbs
