#pragma once

#include "kahler/check_report.hpp"
#include "kahler/continuity.hpp"
#include "kahler/lab/config.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace kahler::lab {

/// A CSV artifact produced by a scenario.
struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ScenarioResult {
  CheckReport report;
  std::vector<Table> tables;
};

/// Runs fn(0), ..., fn(count-1) on up to `jobs` threads; results keep index order.
template <class T>
std::vector<T> parallel_map(int jobs, std::size_t count, const std::function<T(std::size_t)>& fn)
{
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

ScenarioResult run_suite(const ScenarioConfig& config, int jobs);

/// Trajectory as rows (t, c_t, E_0..E_n, I, J, lambda1_radial, min_ricci).
Table trajectory_table(const PathTrajectory& traj, const std::string& file);

/// Least-squares slope of y against x with a two-sided 95% confidence half-width.
struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double half_width = 0;
};
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kahler::lab
