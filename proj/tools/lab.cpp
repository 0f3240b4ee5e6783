// Scenario runner: lab run | list-scenarios | validate

#include "kahler/lab/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace kahler::lab;

namespace {

int run(const std::string& path, const std::string& out, std::optional<std::uint64_t> seed,
        std::optional<std::size_t> grid, int jobs)
{
  ScenarioConfig config;
  try {
    config = load_config(path);
    if (seed) config.seed = *seed;
    if (grid) {
      if (*grid < 16) throw ConfigError("grid must be at least 16");
      config.grid_size = *grid;
    }
    if (const char* env = std::getenv("LAB_OUT"); env && *env) config.out_dir = env;
    if (!out.empty()) config.out_dir = out;
  } catch (const std::exception& e) {
    std::cerr << error_record("", e).dump() << '\n';
    return exit_config_error;
  }
  try {
    const RunOutcome r = run_scenario(config, jobs);
    for (const auto& c : r.result.report.items)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  lhs=" << c.lhs << " rhs=" << c.rhs
                << " tol=" << c.tol << '\n';
    const bool ok = r.result.report.aggregate();
    std::cout << config.scenario << ": " << (ok ? "pass" : "fail") << " (" << r.runtime_seconds << " s, report in "
              << config.out_dir << ")\n";
    return ok ? exit_pass : exit_check_failure;
  } catch (const std::exception& e) {
    const auto record = error_record(config.scenario, e);
    std::cerr << record.dump() << '\n';
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (!ec) std::ofstream(std::filesystem::path(config.out_dir) / "error.json") << record.dump(2) << '\n';
    return exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Check-suite runner for radial Kahler geometry"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run a scenario from a JSON config");
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  std::size_t grid = 0;
  int jobs = 1;
  run_cmd->add_option("--config", config_path, "scenario config")->required();
  auto* out_opt = run_cmd->add_option("--out", out_dir, "output directory");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "override the config seed");
  auto* grid_opt = run_cmd->add_option("--grid", grid, "override the grid size");
  run_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  app.add_subcommand("list-scenarios", "print the known scenario names");

  auto* validate_cmd = app.add_subcommand("validate", "parse a config without running it");
  std::string validate_path;
  validate_cmd->add_option("--config", validate_path, "scenario config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config_error;
  }

  if (app.got_subcommand("list-scenarios")) {
    for (const auto& name : scenario_names()) std::cout << name << '\n';
    return exit_pass;
  }
  if (app.got_subcommand("validate")) {
    try {
      const ScenarioConfig c = load_config(validate_path);
      std::cout << to_json(c).dump(2) << '\n';
      return exit_pass;
    } catch (const std::exception& e) {
      std::cerr << error_record("", e).dump() << '\n';
      return exit_config_error;
    }
  }
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> grid_override;
  if (*seed_opt) seed_override = seed;
  if (*grid_opt) grid_override = grid;
  return run(config_path, *out_opt ? out_dir : "", seed_override, grid_override, jobs);
}
