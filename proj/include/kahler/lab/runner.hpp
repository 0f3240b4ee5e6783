#pragma once

#include "kahler/lab/config.hpp"
#include "kahler/lab/scenarios.hpp"

#include <json.hpp>

namespace kahler::lab {

enum ExitCode { exit_pass = 0, exit_check_failure = 1, exit_config_error = 2, exit_numerical_error = 3 };

struct RunOutcome {
  ScenarioResult result;
  double runtime_seconds = 0;
  nlohmann::json report;
};

/// Applies tolerance overrides from the config to the report items.
void apply_tolerances(CheckReport& report, const std::map<std::string, double>& overrides);

nlohmann::json report_json(const ScenarioConfig& config, const CheckReport& report, double runtime_seconds);

/// Runs the suite and writes report.json plus CSV tables into config.out_dir.
RunOutcome run_scenario(const ScenarioConfig& config, int jobs = 1);
/// Same, without touching the filesystem.
RunOutcome evaluate_scenario(const ScenarioConfig& config, int jobs = 1);

/// Exit code for an exception raised while running a scenario.
int exit_code_for(const std::exception& e);
nlohmann::json error_record(const std::string& scenario, const std::exception& e);

}  // namespace kahler::lab
