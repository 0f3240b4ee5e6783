#include "kahler/lab/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace kahler::lab {

using nlohmann::json;

const std::vector<std::string>& scenario_names()
{
  static const std::vector<std::string> names = {
      "exact_identities", "fs_anchors",     "ek_path_independence", "closed_form_agreement", "cocycle",
      "ricci_positive_bound", "energy_lower_bound", "aubin_path",   "yau_path",              "futaki",
      "properness_chain", "orbit_flatness", "properness_probe",     "krf_monotone",          "cy_torus"};
  return names;
}

bool is_scenario(const std::string& name)
{
  const auto& all = scenario_names();
  return std::find(all.begin(), all.end(), name) != all.end();
}

namespace {

template <class T>
T get(const json& j, const char* key)
{
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

ScenarioConfig parse_config(const json& j)
{
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"scenario", "model",  "n",     "grid_size", "seed",
                                              "modes",    "amplitude", "count", "t_step",   "dt",
                                              "steps",    "tolerances", "out_dir"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  for (const char* key : {"scenario", "model", "n", "grid_size", "seed"})
    if (!j.contains(key)) throw ConfigError(std::string("missing required config key '") + key + "'");

  ScenarioConfig c;
  c.scenario = get<std::string>(j, "scenario");
  if (!is_scenario(c.scenario)) throw ConfigError("unknown scenario '" + c.scenario + "'");
  try {
    c.model = model_from_string(get<std::string>(j, "model"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  c.n = get<int>(j, "n");
  const auto grid = get<long long>(j, "grid_size");
  if (grid < 16) throw ConfigError("grid_size must be at least 16");
  c.grid_size = static_cast<std::size_t>(grid);
  c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("modes")) c.modes = get<int>(j, "modes");
  if (j.contains("amplitude")) c.amplitude = get<double>(j, "amplitude");
  if (j.contains("count")) c.count = get<int>(j, "count");
  if (j.contains("t_step")) c.t_step = get<double>(j, "t_step");
  if (j.contains("dt")) c.dt = get<double>(j, "dt");
  if (j.contains("steps")) c.steps = get<int>(j, "steps");
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances must be an object of check name to number");
    for (const auto& [name, value] : t.items()) {
      if (!value.is_number()) throw ConfigError("tolerance for '" + name + "' is not a number");
      c.tolerances[name] = value.get<double>();
    }
  }
  if (j.contains("out_dir")) c.out_dir = get<std::string>(j, "out_dir");

  if (c.n < 1 || c.n > 4) throw ConfigError("n must be between 1 and 4");
  if (c.modes < 1 || c.modes > 32) throw ConfigError("modes must be between 1 and 32");
  if (!(c.amplitude >= 0)) throw ConfigError("amplitude must be nonnegative");
  if (c.count < 0) throw ConfigError("count must be nonnegative");
  if (!(c.t_step > 0 && c.t_step <= 0.5)) throw ConfigError("t_step must lie in (0, 0.5]");
  if (c.steps < 1) throw ConfigError("steps must be positive");
  return c;
}

ScenarioConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

json to_json(const ScenarioConfig& c)
{
  json j = json::object();
  j["scenario"] = c.scenario;
  j["model"] = std::string(to_string(c.model));
  j["n"] = c.n;
  j["grid_size"] = c.grid_size;
  j["seed"] = c.seed;
  j["modes"] = c.modes;
  j["amplitude"] = c.amplitude;
  j["count"] = c.count;
  j["t_step"] = c.t_step;
  j["dt"] = c.dt;
  j["steps"] = c.steps;
  j["tolerances"] = c.tolerances;
  j["out_dir"] = c.out_dir;
  return j;
}

}  // namespace kahler::lab
