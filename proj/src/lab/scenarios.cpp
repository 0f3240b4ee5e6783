#include "kahler/lab/scenarios.hpp"

#include "kahler/exact.hpp"
#include "kahler/flow.hpp"
#include "kahler/functionals.hpp"
#include "kahler/lab/family.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <map>

namespace kahler::lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Suite = ScenarioResult (*)(const ScenarioConfig&, int);

BackgroundPtr background(const ScenarioConfig& c, Model required)
{
  if (c.model != required)
    throw ConfigError("scenario " + c.scenario + " needs model " + std::string(to_string(required)));
  return fs_background(c.model, c.n, c.grid_size);
}

int family_size(const ScenarioConfig& c, int fallback)
{
  return c.count > 0 ? c.count : fallback;
}

FamilyParams family_params(const ScenarioConfig& c, int count, bool ramp = false)
{
  return {c.modes, c.amplitude, count, ramp};
}

double relative_gap(double a, double b)
{
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-4});
}

double max_abs(std::span<const double> v)
{
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string k_suffix(int k)
{
  return " k=" + std::to_string(k);
}

// ------------------------------------------------------------------ exact

ScenarioResult exact_identities(const ScenarioConfig&, int)
{
  ScenarioResult out;
  out.report.append(verify_zero_identity(12));
  out.report.append(verify_binomial_identity(30));
  for (int n = 1; n <= 4; ++n) out.report.append(verify_sigma_expansion(n));
  return out;
}

// ------------------------------------------------------------------ Fubini-Study

ScenarioResult fs_anchors(const ScenarioConfig& c, int)
{
  const auto bg = background(c, Model::cpn);
  const MetricState fs = reference_state(bg);
  ScenarioResult out;
  CheckReport& rep = out.report;
  rep.add("FS Ricci eigenvalues", "Ric(omega_FS) = omega_FS", fs.einstein_deviation(), 0, 1e-9, Relation::equal)
      .note = "max |lambda - 1| over nodes";
  rep.add("FS Ricci potential", "f vanishes for a Kahler-Einstein metric", max_abs(ricci_potential(fs).f.values), 0,
          1e-9, Relation::equal);
  rep.add("FS volume", "Int omega^n = (2 pi (n+1))^n", bg->integrate(fs.density_ratio) / bg->volume(), 1, 1e-12,
          Relation::equal);
  for (int k = 0; k <= c.n; ++k)
    rep.add("mu_k" + k_suffix(k), "mu_k = 1 in the anticanonical class", mu_k(fs, k), 1, 1e-10, Relation::equal);
  for (int k = 0; k <= c.n; ++k)
    rep.add("critical residual" + k_suffix(k), "FS is critical for every E_k", max_abs(critical_residual(fs, k)), 0,
            1e-8, Relation::equal);
  return out;
}

// ------------------------------------------------------------------ E_k well-definedness

struct PathValues {
  std::vector<double> linear, quadratic, closed;
};

ScenarioResult energy_agreement(const ScenarioConfig& c, int jobs, bool compare_paths)
{
  const auto bg = background(c, Model::cpn);
  const int count = family_size(c, 20);
  const auto params = family_params(c, count);
  const std::function<PathValues(std::size_t)> eval = [&](std::size_t i) {
    const auto phi = generate_member(bg, c.seed, c.scenario, i, params);
    PathValues v;
    for (int k = 0; k <= c.n; ++k) {
      v.linear.push_back(e_k_path(bg, phi, k, PathKind::linear).value);
      if (compare_paths)
        v.quadratic.push_back(e_k_path(bg, phi, k, PathKind::quadratic).value);
      else
        v.closed.push_back(e_k_closed(bg, phi, k).value);
    }
    return v;
  };
  const auto values = parallel_map(jobs, static_cast<std::size_t>(count), eval);

  ScenarioResult out;
  Table table{c.scenario + ".csv", {"index", "k", "linear", compare_paths ? "quadratic" : "closed", "relative_gap"}, {}};
  for (int k = 0; k <= c.n; ++k) {
    double worst = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double a = values[i].linear[static_cast<std::size_t>(k)];
      const double b = compare_paths ? values[i].quadratic[static_cast<std::size_t>(k)]
                                     : values[i].closed[static_cast<std::size_t>(k)];
      const double gap = relative_gap(a, b);
      worst = std::max(worst, gap);
      table.rows.push_back({double(i), double(k), a, b, gap});
    }
    auto& item = compare_paths ? out.report.add("path independence" + k_suffix(k),
                                                "E_k does not depend on the path", worst, 0, 1e-8, Relation::less_equal)
                               : out.report.add("closed form agreement" + k_suffix(k),
                                                "E_k through the change-of-metric functionals", worst, 0, 1e-6,
                                                Relation::less_equal);
    item.note = "max relative gap over " + std::to_string(count) + " potentials (denominator at least 1e-4)";
  }
  out.tables.push_back(std::move(table));
  return out;
}

ScenarioResult ek_path_independence(const ScenarioConfig& c, int jobs)
{
  return energy_agreement(c, jobs, true);
}

ScenarioResult closed_form_agreement(const ScenarioConfig& c, int jobs)
{
  return energy_agreement(c, jobs, false);
}

ScenarioResult cocycle(const ScenarioConfig& c, int jobs)
{
  const auto bg = background(c, Model::cpn);
  const int count = family_size(c, 20);
  const auto params = family_params(c, count);
  const auto family = generate_family(bg, c.seed, c.scenario, params);
  const MetricState fs = reference_state(bg);
  const std::function<std::vector<double>(std::size_t)> eval = [&](std::size_t i) {
    const auto& a = family[i];
    const auto& b = family[(i + 1) % family.size()];
    const MetricState sa = make_metric(bg, a), sb = make_metric(bg, b);
    std::vector<double> gaps;
    for (int k = 0; k <= c.n; ++k)
      gaps.push_back(e_k_closed(fs, sb, k) - e_k_closed(fs, sa, k) - e_k_closed(sa, sb, k));
    return gaps;
  };
  const auto gaps = parallel_map(jobs, family.size(), eval);
  ScenarioResult out;
  Table table{"cocycle.csv", {"index", "k", "defect"}, {}};
  for (int k = 0; k <= c.n; ++k) {
    double worst = 0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      worst = std::max(worst, std::abs(gaps[i][static_cast<std::size_t>(k)]));
      table.rows.push_back({double(i), double(k), gaps[i][static_cast<std::size_t>(k)]});
    }
    out.report.add("cocycle" + k_suffix(k), "E_k(w1,w2) + E_k(w2,w3) = E_k(w1,w3)", worst, 0, 1e-7,
                   Relation::less_equal);
  }
  out.tables.push_back(std::move(table));
  return out;
}

// ------------------------------------------------------------------ lower bounds

struct ProbeValues {
  std::vector<double> energies;
  double ricci_defect = 0;
  double min_ricci = 0;
  double deviation = 0;
};

ScenarioResult ricci_positive_bound(const ScenarioConfig& c, int jobs)
{
  const auto bg = background(c, Model::cpn);
  const int count = family_size(c, 25);
  const auto params = family_params(c, count, true);
  const std::function<ProbeValues(std::size_t)> eval = [&](std::size_t i) {
    // Yau-path endpoint: Ric(omega_tilde) = omega > 0
    const MetricState ref = make_metric(bg, generate_member(bg, c.seed, c.scenario, i, params));
    const auto f = ricci_potential(ref).f.values;
    std::vector<double> density(bg->size());
    for (std::size_t j = 0; j < density.size(); ++j) density[j] = ref.density_ratio[j] * std::exp(f[j]);
    const MetricState tilde = make_metric(bg, solve_prescribed_density(bg, density));
    ProbeValues v;
    for (std::size_t j = 0; j < bg->size(); ++j) {
      v.ricci_defect = std::max(v.ricci_defect, std::abs(tilde.ricci.radial[j] - ref.omega.radial[j]));
      if (c.n > 1)
        v.ricci_defect = std::max(v.ricci_defect, std::abs(tilde.ricci.transverse[j] - ref.omega.transverse[j]));
    }
    v.min_ricci = tilde.min_ricci();
    v.deviation = tilde.einstein_deviation();
    const MetricState fs = reference_state(bg);
    for (int k = 0; k <= c.n; ++k) v.energies.push_back(e_k_closed(fs, tilde, k));
    return v;
  };
  const auto probes = parallel_map(jobs, static_cast<std::size_t>(count), eval);

  ScenarioResult out;
  CheckReport& rep = out.report;
  Table table{"ricci_positive_probes.csv", {"index", "min_ricci", "einstein_deviation"}, {}};
  for (int k = 0; k <= c.n; ++k) table.header.push_back("E_" + std::to_string(k));
  double defect = 0, min_ricci = kInf;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    defect = std::max(defect, probes[i].ricci_defect);
    min_ricci = std::min(min_ricci, probes[i].min_ricci);
    std::vector<double> row{double(i), probes[i].min_ricci, probes[i].deviation};
    row.insert(row.end(), probes[i].energies.begin(), probes[i].energies.end());
    table.rows.push_back(std::move(row));
  }
  rep.add("probe Ricci form", "Ric(omega_tilde) equals the reference metric", defect, 0, 1e-6, Relation::less_equal);
  rep.add("probe Ricci-positive", "probes have positive Ricci curvature", min_ricci, 0, 0, Relation::greater_equal);
  for (int k = 0; k <= c.n; ++k) {
    double lowest = kInf;
    std::size_t at = 0;
    for (std::size_t i = 0; i < probes.size(); ++i)
      if (probes[i].energies[static_cast<std::size_t>(k)] < lowest) {
        lowest = probes[i].energies[static_cast<std::size_t>(k)];
        at = i;
      }
    rep.add("E_k >= 0 on Ricci-positive probes" + k_suffix(k), "E_k(omega_KE, omega_tilde) >= 0 for Ric > 0", lowest,
            0, 1e-7, Relation::greater_equal);
    rep.add("minimizer near Kahler-Einstein" + k_suffix(k), "minimum of E_k attained at Kahler-Einstein metrics",
            probes[at].deviation, 0, 1e-2, Relation::less_equal)
        .note = "Einstein deviation of the minimizing probe " + std::to_string(at);
  }
  out.tables.push_back(std::move(table));
  return out;
}

ScenarioResult energy_lower_bound(const ScenarioConfig& c, int jobs)
{
  const auto bg = fs_background(c.model, c.n, c.grid_size);
  const int count = family_size(c, 50);
  const auto params = family_params(c, count);
  const bool torus = c.model == Model::torus;
  const std::function<std::vector<double>(std::size_t)> eval = [&](std::size_t i) {
    const auto phi = generate_member(bg, c.seed, c.scenario, i, params);
    const MetricState st = make_metric(bg, phi);
    const double e1 = torus ? e1_cy(bg, phi) : e_k_closed(reference_state(bg), st, 1);
    return std::vector<double>{double(i), e1, torus ? 0.0 : st.einstein_deviation()};
  };
  const auto rows = parallel_map(jobs, static_cast<std::size_t>(count), eval);
  double lowest = kInf;
  for (const auto& r : rows) lowest = std::min(lowest, r[1]);
  ScenarioResult out;
  if (torus)
    out.report.add("E_1 >= 0 on the torus", "E_1 >= 0 for flat reference", lowest, 0, 1e-10, Relation::greater_equal);
  else
    out.report.add("E_1 >= 0", "E_1(omega_KE, omega') >= 0 for every metric in the class", lowest, 0, 1e-7,
                   Relation::greater_equal);
  out.report.items.back().note = "minimum over " + std::to_string(count) + " seeded metrics";
  out.tables.push_back({"energy_lower_bound.csv", {"index", "E_1", "einstein_deviation"}, rows});
  return out;
}

// ------------------------------------------------------------------ continuity paths

struct PathRun {
  CheckReport report;
  std::vector<Table> tables;
};

ScenarioResult collect(std::vector<PathRun> runs)
{
  ScenarioResult out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    out.report.append(runs[i].report, "ref " + std::to_string(i) + "/");
    for (auto& t : runs[i].tables) out.tables.push_back(std::move(t));
  }
  return out;
}

CheckItem reach_check(const PathTrajectory& traj, double target)
{
  const double reached = traj.points.empty() ? 0.0 : traj.points.back().t;
  CheckItem c = make_check("path reaches t=" + std::to_string(target).substr(0, 3), "continuity path solvable up to t",
                           reached, target, 0, Relation::greater_equal);
  if (!traj.completed()) c.note = traj.reason;
  return c;
}

ScenarioResult aubin_path(const ScenarioConfig& c, int jobs)
{
  const auto bg = background(c, Model::cpn);
  const int count = family_size(c, 2);
  const auto params = family_params(c, count);
  const auto grid = uniform_t_grid(c.t_step);
  const std::function<PathRun(std::size_t)> eval = [&](std::size_t i) {
    const MetricState ref = make_metric(bg, generate_member(bg, c.seed, c.scenario, i, params));
    const PathTrajectory traj = solve_aubin_path(ref, grid);
    PathRun run;
    run.report.add(reach_check(traj, 1.0));
    run.report.append(check_aubin_trajectory(traj));
    if (traj.points.size() >= 3) run.report.append(d_dt_i_minus_j_check(traj));
    for (int k = 0; k <= c.n; ++k) run.report.append(check_aubin_energy_change(traj, k));
    run.tables.push_back(trajectory_table(traj, "trajectory_aubin_" + std::to_string(i) + ".csv"));
    return run;
  };
  return collect(parallel_map(jobs, static_cast<std::size_t>(count), eval));
}

ScenarioResult yau_path(const ScenarioConfig& c, int jobs)
{
  const auto bg = background(c, Model::cpn);
  const int count = family_size(c, 20);
  const auto params = family_params(c, count);
  const auto grid = uniform_t_grid(c.t_step);
  const std::function<PathRun(std::size_t)> eval = [&](std::size_t i) {
    const MetricState ref = make_metric(bg, generate_member(bg, c.seed, c.scenario, i, params));
    const PathTrajectory traj = solve_yau_path(ref, grid);
    PathRun run;
    run.report.add(reach_check(traj, 1.0));
    for (int k = 1; k <= c.n; ++k) {
      CheckReport r = check_yau_endpoint_energy(traj, k);
      // the linearized equation does not depend on k
      if (k > 1) std::erase_if(r.items, [](const CheckItem& it) { return it.name == "linearized Yau equation"; });
      run.report.append(r);
    }
    run.tables.push_back(trajectory_table(traj, "trajectory_yau_" + std::to_string(i) + ".csv"));
    return run;
  };
  return collect(parallel_map(jobs, static_cast<std::size_t>(count), eval));
}

ScenarioResult properness_chain(const ScenarioConfig& c, int jobs)
{
  const auto bg = background(c, Model::cpn);
  const int count = family_size(c, 2);
  const auto params = family_params(c, count);
  const auto grid = uniform_t_grid(c.t_step);
  const std::function<PathRun(std::size_t)> eval = [&](std::size_t i) {
    const MetricState ref = make_metric(bg, generate_member(bg, c.seed, c.scenario, i, params));
    const PathTrajectory aubin = solve_aubin_path(ref, grid);
    const PathTrajectory yau = solve_yau_path(ref, grid);
    PathRun run;
    run.report.add(reach_check(aubin, 0.9));
    run.report.append(check_properness_chain(aubin, yau));
    run.tables.push_back(trajectory_table(aubin, "trajectory_aubin_" + std::to_string(i) + ".csv"));
    run.tables.push_back(trajectory_table(yau, "trajectory_yau_" + std::to_string(i) + ".csv"));
    return run;
  };
  return collect(parallel_map(jobs, static_cast<std::size_t>(count), eval));
}

// ------------------------------------------------------------------ holomorphic invariants

void add_futaki(CheckReport& rep, std::span<const MetricState> probes, int n, Table& table)
{
  for (int k = 0; k <= n; ++k) {
    const FutakiValue f = futaki_k(probes, k);
    rep.add("F_k vanishes" + k_suffix(k), "F_k(X) = 0 when a Kahler-Einstein metric exists", std::abs(f.value), 0,
            1e-6, Relation::less_equal);
    rep.add("F_k metric independence" + k_suffix(k), "F_k(X) does not depend on the metric", f.spread, 0, 1e-6,
            Relation::less_equal);
    for (std::size_t i = 0; i < f.per_probe.size(); ++i) table.rows.push_back({double(i), double(k), f.per_probe[i]});
  }
}

ScenarioResult futaki(const ScenarioConfig& c, int jobs)
{
  const auto bg = background(c, Model::cpn);
  const int count = family_size(c, 8);
  const auto params = family_params(c, count);
  const std::function<MetricState(std::size_t)> eval = [&](std::size_t i) {
    return i == 0 ? reference_state(bg) : make_metric(bg, generate_member(bg, c.seed, c.scenario, i - 1, params));
  };
  const auto probes = parallel_map(jobs, static_cast<std::size_t>(count) + 1, eval);
  ScenarioResult out;
  Table table{"futaki.csv", {"probe", "k", "F_k"}, {}};
  add_futaki(out.report, probes, c.n, table);
  out.tables.push_back(std::move(table));
  return out;
}

ScenarioResult orbit_flatness(const ScenarioConfig& c, int jobs)
{
  const auto bg = background(c, Model::cpn);
  const int count = std::max(family_size(c, 8), 2);
  const MetricState fs = reference_state(bg);
  // s from 0.25 to 1 so that J grows by more than a factor 10
  const std::function<MetricState(std::size_t)> eval = [&](std::size_t i) {
    const double s = 0.25 * std::pow(4.0, double(i) / (count - 1));
    return make_metric(bg, orbit_pullback(fs, s));
  };
  const auto states = parallel_map(jobs, static_cast<std::size_t>(count), eval);
  ScenarioResult out;
  CheckReport& rep = out.report;
  Table sweep{"orbit_sweep.csv", {"s", "J"}, {}};
  for (int k = 0; k <= c.n; ++k) sweep.header.push_back("E_" + std::to_string(k));
  double j_min = kInf, j_max = 0;
  std::vector<double> worst(static_cast<std::size_t>(c.n) + 1, 0.0);
  for (int i = 0; i < count; ++i) {
    const auto& st = states[static_cast<std::size_t>(i)];
    const double j = i_j(fs, st).j;
    j_min = std::min(j_min, j);
    j_max = std::max(j_max, j);
    std::vector<double> row{0.25 * std::pow(4.0, double(i) / (count - 1)), j};
    for (int k = 0; k <= c.n; ++k) {
      const double e = e_k_closed(fs, st, k);
      worst[static_cast<std::size_t>(k)] = std::max(worst[static_cast<std::size_t>(k)], std::abs(e));
      row.push_back(e);
    }
    sweep.rows.push_back(std::move(row));
  }
  rep.add("J range along orbit", "orbit sweep spans a factor 10 in J", j_max / j_min, 10, 0, Relation::greater_equal);
  for (int k = 0; k <= c.n; ++k)
    rep.add("E_k flat along orbit" + k_suffix(k), "E_k vanishes between Kahler-Einstein metrics",
            worst[static_cast<std::size_t>(k)], 0, 1e-5, Relation::less_equal);
  Table table{"orbit_futaki.csv", {"probe", "k", "F_k"}, {}};
  add_futaki(rep, states, c.n, table);
  out.tables.push_back(std::move(sweep));
  out.tables.push_back(std::move(table));
  return out;
}

// ------------------------------------------------------------------ growth probe

RadialPotential non_orbit_direction(BackgroundPtr bg, const ScenarioConfig& c, const FamilyParams& params)
{
  // remove the component along the moment coordinate, the tangent of the radial automorphism orbit
  const auto x = bg->nodes();
  const double mean = bg->integrate(std::vector<double>(x.begin(), x.end())) / bg->volume();
  std::vector<double> tangent(x.size()), sq(x.size()), prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    tangent[i] = x[i] - mean;
    sq[i] = tangent[i] * tangent[i];
  }
  const double norm = bg->integrate(sq);
  for (std::size_t index = 0; index < 100; ++index) {
    RadialPotential p = generate_member(bg, c.seed, c.scenario, index, params);
    for (std::size_t i = 0; i < x.size(); ++i) prod[i] = p.values[i] * tangent[i];
    const double coef = bg->integrate(prod) / norm;
    for (std::size_t i = 0; i < x.size(); ++i) p.values[i] -= coef * tangent[i];
    try {
      make_metric(bg, p);
      return p;
    } catch (const NotKahlerError&) {
    }
  }
  throw ParameterError("no admissible non-orbit direction; use a smaller amplitude");
}

ScenarioResult properness_probe(const ScenarioConfig& c, int jobs)
{
  const auto bg = background(c, Model::cpn);
  const int count = std::max(family_size(c, 10), 3);
  const auto theta = non_orbit_direction(bg, c, family_params(c, 1));
  const MetricState fs = reference_state(bg);
  const std::function<std::vector<double>(std::size_t)> eval = [&](std::size_t i) {
    const double a = 0.1 * std::pow(10.0, double(i) / (count - 1));
    const MetricState st = make_metric(bg, a * theta);
    return std::vector<double>{a, i_j(fs, st).j, e_k_closed(fs, st, 1)};
  };
  const auto rows = parallel_map(jobs, static_cast<std::size_t>(count), eval);

  ScenarioResult out;
  CheckReport& rep = out.report;
  double lowest = kInf, step = kInf;
  std::vector<double> log_j, log_e;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    lowest = std::min(lowest, rows[i][2]);
    if (i > 0) step = std::min(step, rows[i][2] - rows[i - 1][2]);
    if (rows[i][1] > 0 && rows[i][2] > 0) {
      log_j.push_back(std::log(rows[i][1]));
      log_e.push_back(std::log(rows[i][2]));
    }
  }
  rep.add("E_1 >= 0 on probe family", "E_1 bounded below", lowest, 0, 1e-7, Relation::greater_equal);
  rep.add("E_1 grows along probe family", "E_1 increases with J off the automorphism orbit", step, 0, 1e-10,
          Relation::greater_equal);
  if (log_j.size() >= 3) {
    const SlopeFit fit = fit_slope(log_j, log_e);
    CheckItem e = make_check("empirical growth exponent", "slope of log E_1 against log J", fit.slope, fit.slope, 0,
                             Relation::equal);
    e.note = "reported only; 95% interval [" + std::to_string(fit.slope - fit.half_width) + ", " +
             std::to_string(fit.slope + fit.half_width) + "]";
    rep.add(e);
  } else {
    rep.add(skipped_check("empirical growth exponent", "slope of log E_1 against log J",
                          "fewer than three positive samples"));
  }
  CheckItem sub = make_check("properness inequality not tested", "E_1 >= C J^delta - C'", 0, 0, 0, Relation::equal);
  sub.note = "constants are existential and radial potentials meet automorphism orbits; substituted by this probe "
             "and by orbit_flatness";
  rep.add(sub);
  out.tables.push_back({"properness_probe.csv", {"scale", "J", "E_1"}, rows});
  return out;
}

// ------------------------------------------------------------------ flows

struct FlowSummary {
  double e0_increase = -kInf;
  double e1_increase = -kInf;
  double volume_error = 0;
  double final_deviation = 0;
  bool truncated = false;
  Table table;
};

FlowSummary summarize_flow(const FlowTrajectory& flow, const std::string& file)
{
  FlowSummary s;
  s.truncated = flow.truncated;
  s.table = {file, {"time", "E_0", "E_1", "min_ricci", "volume_error", "einstein_deviation"}, {}};
  for (std::size_t i = 0; i < flow.samples.size(); ++i) {
    const auto& p = flow.samples[i];
    s.volume_error = std::max(s.volume_error, p.volume_error);
    if (i > 0) {
      const auto& q = flow.samples[i - 1];
      s.e0_increase = std::max(s.e0_increase, p.e0 - q.e0);
      if (q.ricci_plus_metric_nonnegative) s.e1_increase = std::max(s.e1_increase, p.e1 - q.e1);
    }
    s.table.rows.push_back({p.time, p.e0, p.e1, p.min_ricci, p.volume_error, p.einstein_deviation});
  }
  if (!flow.samples.empty()) s.final_deviation = flow.samples.back().einstein_deviation;
  return s;
}

ScenarioResult krf_monotone(const ScenarioConfig& c, int jobs)
{
  const auto bg = background(c, Model::cpn);
  const int count = family_size(c, 20);
  const auto params = family_params(c, count);
  ScenarioResult out;
  CheckReport& rep = out.report;

  const FlowTrajectory still = run_flow(bg, RadialPotential::zero(*bg), c.dt, c.steps);
  double drift = 0;
  for (const auto& p : still.samples) drift = std::max({drift, max_abs(p.potential.values), p.einstein_deviation});
  rep.add("FS stationary under the flow", "Kahler-Einstein metrics are fixed points", drift, 0, 1e-8,
          Relation::less_equal);

  const std::function<FlowSummary(std::size_t)> eval = [&](std::size_t i) {
    const auto phi = generate_member(bg, c.seed, c.scenario, i, params);
    return summarize_flow(run_flow(bg, phi, c.dt, c.steps), "flow_" + std::to_string(i) + ".csv");
  };
  auto runs = parallel_map(jobs, static_cast<std::size_t>(count), eval);
  double e0 = -kInf, e1 = -kInf, vol = 0, dev = 0;
  int truncated = 0;
  for (auto& r : runs) {
    e0 = std::max(e0, r.e0_increase);
    e1 = std::max(e1, r.e1_increase);
    vol = std::max(vol, r.volume_error);
    dev = std::max(dev, r.final_deviation);
    truncated += r.truncated;
    out.tables.push_back(std::move(r.table));
  }
  rep.add("E_0 nonincreasing", "E_0 decreases along the Kahler-Ricci flow", e0, 0, 1e-7, Relation::less_equal)
      .note = "largest per-step increase";
  rep.add("E_1 nonincreasing while Ric >= -omega", "E_1 decreases along the flow when Ric + omega >= 0", e1, 0, 1e-7,
          Relation::less_equal)
      .note = "largest per-step increase";
  rep.add("flow preserves volume", "normalized flow keeps the Kahler class", vol, 0, 1e-10, Relation::less_equal);
  rep.add("flow runs complete", "flow defined for all time", double(truncated), 0, 0, Relation::equal);
  rep.add("distance to Kahler-Einstein at end", "flow converges to a Kahler-Einstein metric", dev, 0, 0,
          Relation::greater_equal)
      .note = "measured only";
  return out;
}

ScenarioResult cy_torus(const ScenarioConfig& c, int jobs)
{
  const auto bg = background(c, Model::torus);
  const int count = family_size(c, 50);
  const auto params = family_params(c, count);
  const std::function<std::vector<double>(std::size_t)> eval = [&](std::size_t i) {
    const auto phi = generate_member(bg, c.seed, c.scenario, i, params);
    // translations are automorphisms of the torus
    RadialPotential moved{std::vector<double>(bg->size()), Normalization::none};
    const auto x = bg->nodes();
    for (std::size_t j = 0; j < moved.values.size(); ++j)
      moved.values[j] = bg->basis().interpolate(phi.values, std::fmod(x[j] + 0.3, 1.0));
    return std::vector<double>{double(i), e1_cy(bg, phi), e1_cy(bg, moved)};
  };
  const auto rows = parallel_map(jobs, static_cast<std::size_t>(count), eval);
  double lowest = kInf, shift = 0;
  for (const auto& r : rows) {
    lowest = std::min(lowest, r[1]);
    shift = std::max(shift, std::abs(r[1] - r[2]));
  }
  ScenarioResult out;
  out.report.add("E_1 >= 0 on the torus", "E_1 >= 0 for flat reference", lowest, 0, 1e-10, Relation::greater_equal);
  out.report.add("flat metric value", "E_1 vanishes at the flat metric", e1_cy(bg, RadialPotential::zero(*bg)), 0,
                 1e-14, Relation::equal);
  out.report.add("translation invariance", "E_1 invariant under automorphisms", shift, 0, 1e-10, Relation::less_equal);
  out.tables.push_back({"cy_torus.csv", {"index", "E_1", "E_1_translated"}, rows});
  return out;
}

const std::map<std::string, Suite>& registry()
{
  static const std::map<std::string, Suite> suites = {
      {"exact_identities", exact_identities},
      {"fs_anchors", fs_anchors},
      {"ek_path_independence", ek_path_independence},
      {"closed_form_agreement", closed_form_agreement},
      {"cocycle", cocycle},
      {"ricci_positive_bound", ricci_positive_bound},
      {"energy_lower_bound", energy_lower_bound},
      {"aubin_path", aubin_path},
      {"yau_path", yau_path},
      {"futaki", futaki},
      {"properness_chain", properness_chain},
      {"orbit_flatness", orbit_flatness},
      {"properness_probe", properness_probe},
      {"krf_monotone", krf_monotone},
      {"cy_torus", cy_torus},
  };
  return suites;
}

}  // namespace

ScenarioResult run_suite(const ScenarioConfig& config, int jobs)
{
  const auto it = registry().find(config.scenario);
  if (it == registry().end()) throw ConfigError("unknown scenario '" + config.scenario + "'");
  ScenarioResult out = it->second(config, jobs);
  out.report.scenario = config.scenario;
  return out;
}

Table trajectory_table(const PathTrajectory& traj, const std::string& file)
{
  const int n = traj.reference.bg().n();
  Table t{file, {"t", "c_t"}, {}};
  for (int k = 0; k <= n; ++k) t.header.push_back("E_" + std::to_string(k));
  for (const char* h : {"I", "J", "lambda1_radial", "min_ricci"}) t.header.push_back(h);
  for (const auto& p : traj.points) {
    std::vector<double> row{p.t, p.c_t};
    for (int k = 0; k <= n; ++k)
      row.push_back(static_cast<std::size_t>(k) < p.monitors.e_k.size() ? p.monitors.e_k[static_cast<std::size_t>(k)]
                                                                         : NAN);
    row.insert(row.end(), {p.monitors.i, p.monitors.j, p.monitors.lambda1_radial, p.monitors.min_ricci});
    t.rows.push_back(std::move(row));
  }
  return t;
}

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  const std::size_t m = x.size();
  if (m < 3 || y.size() != m) throw ParameterError("slope fit needs at least three paired samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(m);
  my /= double(m);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  const double dof = double(m - 2);
  const boost::math::students_t dist(dof);
  fit.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * std::sqrt(rss / dof / sxx);
  return fit;
}

}  // namespace kahler::lab
