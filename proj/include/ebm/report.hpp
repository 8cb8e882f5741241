#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ebm/scenario.hpp"

namespace ebm {

inline constexpr int exit_clean = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_violation = 10;
inline constexpr int exit_budget = 20;

struct AnalysisOutcome {
    std::string name;
    CheckStatus status = CheckStatus::clean;
    std::vector<std::string> lines;  // human-readable body
    nlohmann::json data = nlohmann::json::object();
    std::optional<Scenario> replay;  // scenario reproducing the counterexample or witness
};

struct ReportBundle {
    std::string scenario_name;
    std::vector<AnalysisOutcome> outcomes;

    int exit_code() const;
    std::string text() const;
    nlohmann::json json() const;
};

/// Runs the named analyses, in order, on a validated scenario.
ReportBundle run_scenario(const Scenario& sc, const std::vector<std::string>& analyses);
AnalysisOutcome run_analysis(const Scenario& sc, const std::string& name);

/// report.txt, report.json and one replay_<analysis>.scn per outcome that carries a replay.
void write_report(const ReportBundle& bundle, const std::string& dir);

}  // namespace ebm
