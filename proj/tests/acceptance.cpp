// Acceptance run: one line per criterion, tolerances pinned below.

#include "kahler/lab/runner.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <string>
#include <vector>

using namespace kahler;
using namespace kahler::lab;
using nlohmann::json;

namespace {

constexpr std::size_t kGrid = 256;
constexpr std::size_t kTorusGrid = 128;
constexpr std::size_t kFlowGrid = 64;

struct Run {
  json config;
  RunOutcome outcome;
};

std::deque<Run> all_runs;

const Run& run(json config)
{
  config["out_dir"] = "unused";
  const ScenarioConfig c = parse_config(config);
  all_runs.push_back({config, evaluate_scenario(c, 1)});
  return all_runs.back();
}

json cpn(const std::string& scenario, int n, std::size_t grid, std::uint64_t seed)
{
  return {{"scenario", scenario}, {"model", "cpn"}, {"n", n}, {"grid_size", grid}, {"seed", seed}};
}

std::string base_name(const std::string& name)
{
  const auto slash = name.rfind('/');
  return slash == std::string::npos ? name : name.substr(slash + 1);
}

class Criterion {
 public:
  Criterion(int id, std::string text) : id_(id), text_(std::move(text)) {}

  void require(bool ok, const std::string& what)
  {
    if (!ok) fail(what);
  }

  void aggregate(const Run& r)
  {
    for (const auto& c : r.outcome.result.report.items)
      if (!c.pass) fail(r.config["scenario"].get<std::string>() + ": " + c.name);
  }

  // Every item whose name (without prefix) starts with `prefix` must satisfy the pinned tolerance.
  void expect(const Run& r, const std::string& prefix, double tol, Relation rel, bool relative = false)
  {
    int matched = 0;
    for (const auto& c : r.outcome.result.report.items) {
      if (base_name(c.name).rfind(prefix, 0) != 0) continue;
      ++matched;
      const double t = relative ? tol * (1 + std::abs(c.lhs)) : tol;
      const CheckItem pinned = make_check(c.name, c.anchor, c.lhs, c.rhs, t, rel);
      if (!pinned.pass) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s (lhs %.3e, rhs %.3e, tol %.1e)", c.name.c_str(), c.lhs, c.rhs, t);
        fail(buf);
      }
    }
    if (matched == 0) fail("no check named '" + prefix + "' in " + r.config["scenario"].get<std::string>());
  }

  bool finish() const
  {
    std::printf("criterion %2d %s  %s\n", id_, failures_.empty() ? "PASS" : "FAIL", text_.c_str());
    for (const auto& f : failures_) std::printf("              failed: %s\n", f.c_str());
    std::fflush(stdout);
    return failures_.empty();
  }

 private:
  void fail(const std::string& what) { failures_.push_back(what); }

  int id_;
  std::string text_;
  std::vector<std::string> failures_;
};

bool exact_identities()
{
  Criterion c(1, "exact identities: zero identity n<=12, binomial sum k<=30, sigma expansion n<=4, under 1 s");
  const Run& r = run(cpn("exact_identities", 1, 16, 0));
  c.aggregate(r);
  c.expect(r, "binomial zero identity", 0, Relation::equal);
  c.expect(r, "alternating binomial sum", 0, Relation::equal);
  c.expect(r, "sigma_k two-eigenvalue form", 0, Relation::equal);
  c.require(r.outcome.runtime_seconds < 1.0, "runtime " + std::to_string(r.outcome.runtime_seconds) + " s");
  return c.finish();
}

bool fs_anchors()
{
  Criterion c(2, "Fubini-Study anchors: Ricci = metric, f = 0, mu_k = 1, critical residual = 0 (n = 1..4)");
  for (int n = 1; n <= 4; ++n) {
    const Run& r = run(cpn("fs_anchors", n, kGrid, 0));
    c.aggregate(r);
    c.expect(r, "FS Ricci eigenvalues", 1e-9, Relation::equal);
    c.expect(r, "FS Ricci potential", 1e-9, Relation::equal);
    c.expect(r, "mu_k", 1e-10, Relation::equal);
    c.expect(r, "critical residual", 1e-8, Relation::equal);
  }
  return c.finish();
}

bool well_defined()
{
  Criterion c(3, "E_k well defined: path independence 1e-8, closed form 1e-6, cocycle 1e-7 (20 seeds, n = 1, 2)");
  for (int n = 1; n <= 2; ++n) {
    const Run& a = run(cpn("ek_path_independence", n, kGrid, 101));
    const Run& b = run(cpn("closed_form_agreement", n, kGrid, 102));
    const Run& d = run(cpn("cocycle", n, kGrid, 103));
    c.expect(a, "path independence", 1e-8, Relation::less_equal);
    c.expect(b, "closed form agreement", 1e-6, Relation::less_equal);
    c.expect(d, "cocycle", 1e-7, Relation::less_equal);
    c.aggregate(a);
    c.aggregate(b);
    c.aggregate(d);
  }
  return c.finish();
}

bool ricci_positive()
{
  Criterion c(4, "E_k >= -1e-7 on 25 Ricci-positive Yau-endpoint probes on CP^2, minimizer within 1e-2 of KE");
  const Run& r = run(cpn("ricci_positive_bound", 2, kGrid, 104));
  c.aggregate(r);
  c.expect(r, "probe Ricci-positive", 0, Relation::greater_equal);
  c.expect(r, "E_k >= 0 on Ricci-positive probes", 1e-7, Relation::greater_equal);
  c.expect(r, "minimizer near Kahler-Einstein", 1e-2, Relation::less_equal);
  return c.finish();
}

bool e1_lower_bound()
{
  Criterion c(5, "E_1 >= -1e-7 on 50 seeded metrics on CP^1 and CP^2; torus E_1 >= -1e-10 on 50 seeds");
  for (int n = 1; n <= 2; ++n) {
    const Run& r = run(cpn("energy_lower_bound", n, kGrid, 105));
    c.aggregate(r);
    c.expect(r, "E_1 >= 0", 1e-7, Relation::greater_equal);
  }
  json torus = {{"scenario", "cy_torus"}, {"model", "torus"}, {"n", 1}, {"grid_size", kTorusGrid}, {"seed", 106}};
  const Run& t = run(torus);
  c.aggregate(t);
  c.expect(t, "E_1 >= 0 on the torus", 1e-10, Relation::greater_equal);
  return c.finish();
}

bool aubin_suite()
{
  Criterion c(6, "Aubin path: linearized equation 1e-5, Ricci identity 1e-6, lambda_1 >= t, I-J nondecreasing, "
                 "energy change formula 1e-5, endpoint inequality");
  for (int n = 1; n <= 2; ++n) {
    const Run& r = run(cpn("aubin_path", n, kGrid, 107));
    c.aggregate(r);
    c.expect(r, "path reaches", 0, Relation::greater_equal);
    c.expect(r, "linearized Aubin equation", 1e-5, Relation::less_equal);
    c.expect(r, "Ricci identity along Aubin path", 1e-6, Relation::less_equal);
    c.expect(r, "radial lambda_1 >= t", 1e-6, Relation::greater_equal);
    c.expect(r, "I-J nondecreasing", 1e-8, Relation::greater_equal);
    c.expect(r, "energy change along Aubin path", 1e-5, Relation::equal, true);
    c.expect(r, "energy decreases across Aubin endpoints", 1e-7, Relation::greater_equal);
  }
  return c.finish();
}

bool yau_suite()
{
  Criterion c(7, "Yau path: linearized equation 1e-5, endpoint formula 1e-5 for k = 1, 2, E_1(psi_1) <= 1e-7 "
                 "(20 references)");
  const Run& r = run(cpn("yau_path", 2, kGrid, 108));
  c.aggregate(r);
  c.expect(r, "path reaches", 0, Relation::greater_equal);
  c.expect(r, "linearized Yau equation", 1e-5, Relation::less_equal);
  c.expect(r, "endpoint energy formula k=1", 1e-5, Relation::equal, true);
  c.expect(r, "endpoint energy formula k=2", 1e-5, Relation::equal, true);
  c.expect(r, "E_1(psi_1) <= 0", 1e-7, Relation::less_equal);
  return c.finish();
}

bool properness_chain()
{
  Criterion c(8, "properness chain: E_1 bound along the path, difference formula at (0.2, 0.8) 1e-5, lower bounds "
                 "via I-J, on paths past t = 0.9");
  for (int n = 1; n <= 2; ++n) {
    const Run& r = run(cpn("properness_chain", n, kGrid, 109));
    c.aggregate(r);
    c.expect(r, "path reaches", 0, Relation::greater_equal);
    c.expect(r, "E_1 bounded along Aubin path", 1e-7, Relation::less_equal, true);
    c.expect(r, "E_1 difference formula", 1e-5, Relation::equal, true);
    c.expect(r, "E_1(theta) >= 2 Int (I-J)", 1e-6, Relation::greater_equal, true);
    c.expect(r, "E_1(theta) from both paths", 1e-5, Relation::equal, true);
    c.expect(r, "E_1 relative to the endpoint metric", 1e-7, Relation::less_equal);
    c.expect(r, "F functional lower bound", 1e-7, Relation::greater_equal);
  }
  return c.finish();
}

bool orbit()
{
  Criterion c(9, "automorphism orbit: J spans 10x, |E_1| <= 1e-5, |F_k| <= 1e-6, metric spread <= 1e-6");
  for (int n = 1; n <= 2; ++n) {
    const Run& r = run(cpn("orbit_flatness", n, kGrid, 0));
    c.aggregate(r);
    c.expect(r, "J range along orbit", 0, Relation::greater_equal);
    c.expect(r, "E_k flat along orbit k=1", 1e-5, Relation::less_equal);
    c.expect(r, "F_k vanishes", 1e-6, Relation::less_equal);
    c.expect(r, "F_k metric independence", 1e-6, Relation::less_equal);
  }
  const Run& f = run(cpn("futaki", 2, kGrid, 110));
  c.aggregate(f);
  c.expect(f, "F_k vanishes", 1e-6, Relation::less_equal);
  c.expect(f, "F_k metric independence", 1e-6, Relation::less_equal);
  return c.finish();
}

bool flow()
{
  Criterion c(10, "Kahler-Ricci flow: FS stationary 1e-8, E_0 and E_1 per-step increase <= 1e-7 (20 runs)");
  for (int n = 1; n <= 2; ++n) {
    const Run& r = run(cpn("krf_monotone", n, kFlowGrid, 111));
    c.aggregate(r);
    c.expect(r, "FS stationary under the flow", 1e-8, Relation::less_equal);
    c.expect(r, "E_0 nonincreasing", 1e-7, Relation::less_equal);
    c.expect(r, "E_1 nonincreasing while Ric >= -omega", 1e-7, Relation::less_equal);
  }
  return c.finish();
}

bool properness_probe()
{
  Criterion c(11, "properness inequality substituted: growth probe off the orbit (E_1 >= 0, monotone, exponent "
                  "reported) plus criterion 9");
  for (int n = 1; n <= 2; ++n) {
    const Run& r = run(cpn("properness_probe", n, kGrid, 112));
    c.aggregate(r);
    c.expect(r, "E_1 >= 0 on probe family", 1e-7, Relation::greater_equal);
    c.expect(r, "E_1 grows along probe family", 1e-10, Relation::greater_equal);
    const CheckItem* e = r.outcome.result.report.find("empirical growth exponent");
    c.require(e && std::isfinite(e->lhs), "empirical exponent missing");
    const CheckItem* s = r.outcome.result.report.find("properness inequality not tested");
    c.require(s && !s->note.empty(), "substitution not documented in the report");
    if (e) std::printf("              n=%d empirical exponent %.6f (%s)\n", n, e->lhs, e->note.c_str());
  }
  return c.finish();
}

bool determinism()
{
  Criterion c(12, "determinism: every report above reproduced byte for byte with 2 worker threads");
  const std::size_t count = all_runs.size();
  for (std::size_t i = 0; i < count; ++i) {
    const ScenarioConfig config = parse_config(all_runs[i].config);
    json again = evaluate_scenario(config, 2).report;
    json first = all_runs[i].outcome.report;
    again.erase("runtime_seconds");
    first.erase("runtime_seconds");
    c.require(again.dump() == first.dump(), config.scenario + " n=" + std::to_string(config.n));
  }
  c.require(count >= 20, "too few reports compared");
  return c.finish();
}

}  // namespace

int main()
{
  bool ok = true;
  try {
    ok &= exact_identities();
    ok &= fs_anchors();
    ok &= well_defined();
    ok &= ricci_positive();
    ok &= e1_lower_bound();
    ok &= aubin_suite();
    ok &= yau_suite();
    ok &= properness_chain();
    ok &= orbit();
    ok &= flow();
    ok &= properness_probe();
    ok &= determinism();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s\n", ok ? "all criteria pass" : "some criteria fail");
  return ok ? 0 : 1;
}
