#pragma once

#include "kahler/geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kahler::lab {

/// Raised for malformed or incomplete configurations (exit code 2).
class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

struct ScenarioConfig {
  std::string scenario;
  Model model = Model::cpn;
  int n = 1;
  std::size_t grid_size = 64;
  std::uint64_t seed = 0;
  int modes = 4;
  double amplitude = 0.05;
  int count = 0;         // family size; 0 selects the scenario default
  double t_step = 0.05;  // continuity-path grid spacing
  double dt = 1e-3;      // flow step
  int steps = 2000;      // flow steps
  std::map<std::string, double> tolerances;
  std::string out_dir = "lab_out";
};

const std::vector<std::string>& scenario_names();
bool is_scenario(const std::string& name);

/// Parses a flat JSON object. Required keys: scenario, model, n, grid_size, seed.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& c);

}  // namespace kahler::lab
