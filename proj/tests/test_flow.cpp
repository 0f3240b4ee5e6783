#include "kahler/flow.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kahler;

namespace {

RadialPotential bump(const Background& bg, double a)
{
  const double r = bg.moment_length();
  RadialPotential p{std::vector<double>(bg.size()), Normalization::none};
  for (std::size_t i = 0; i < bg.size(); ++i) p.values[i] = a * std::cos(std::numbers::pi * bg.nodes()[i] / r);
  return normalized_integral_zero(bg, p);
}

}  // namespace

TEST_CASE("Fubini-Study is a fixed point of the flow")
{
  const auto bg = fs_background(Model::cpn, 2, 48);
  const FlowTrajectory flow = run_flow(bg, RadialPotential::zero(*bg), 1e-3, 200);
  REQUIRE_FALSE(flow.truncated);
  for (const auto& s : flow.samples) {
    for (double v : s.potential.values) CHECK(std::abs(v) < 1e-12);
    CHECK(s.einstein_deviation < 1e-9);
  }
}

TEST_CASE("energies decrease and the flow converges")
{
  for (int n = 1; n <= 2; ++n) {
    const auto bg = fs_background(Model::cpn, n, 48);
    FlowOptions opt;
    opt.record_every = 10;
    const FlowTrajectory flow = run_flow(bg, bump(*bg, 0.3), 1e-3, 8000, opt);
    REQUIRE_FALSE(flow.truncated);
    CHECK(flow.samples.size() == 801);
    for (std::size_t i = 1; i < flow.samples.size(); ++i) {
      const auto& a = flow.samples[i - 1];
      const auto& b = flow.samples[i];
      CHECK(b.e0 <= a.e0 + 1e-12);
      if (a.ricci_plus_metric_nonnegative) CHECK(b.e1 <= a.e1 + 1e-12);
      CHECK(b.volume_error < 1e-12);
    }
    CHECK(flow.samples.back().einstein_deviation < 1e-3 * flow.samples.front().einstein_deviation);
  }
}

TEST_CASE("flow arguments")
{
  const auto bg = fs_background(Model::cpn, 1, 32);
  CHECK_THROWS_AS(run_flow(bg, RadialPotential::zero(*bg), 1e-2, 10), ParameterError);
  CHECK_THROWS_AS(run_flow(bg, RadialPotential::zero(*bg), 1e-3, 20000), ParameterError);
  const auto torus = fs_background(Model::torus, 1, 32);
  CHECK_THROWS_AS(run_flow(torus, RadialPotential::zero(*torus), 1e-3, 10), UnsupportedModelError);
}
