#include "kahler/flow.hpp"

#include "kahler/functionals.hpp"

#include <cmath>

namespace kahler {

namespace {

FlowSample sample(const MetricState& fs, const MetricState& st, double time)
{
  const Background& bg = fs.bg();
  FlowSample s;
  s.time = time;
  s.potential = st.potential;
  s.e0 = e_k_closed(fs, st, 0);
  s.e1 = e_k_closed(fs, st, 1);
  s.min_ricci = st.min_ricci();
  s.ricci_plus_metric_nonnegative = s.min_ricci >= -1;
  s.volume_error = std::abs(bg.integrate(st.density_ratio) / bg.volume() - 1);
  s.einstein_deviation = st.einstein_deviation();
  return s;
}

}  // namespace

FlowTrajectory run_flow(BackgroundPtr bgp, const RadialPotential& phi0, double dt, int steps, const FlowOptions& opt)
{
  const Background& bg = *bgp;
  if (bg.model() != Model::cpn) throw UnsupportedModelError("the flow monitors need the CP^n model");
  if (!(dt > 0) || dt > 1e-3) throw ParameterError("dt must lie in (0, 1e-3]");
  if (steps < 1 || steps * dt > 10 + 1e-12) throw ParameterError("steps * dt must not exceed 10");

  const MetricState fs = make_metric(bgp, RadialPotential::zero(bg));
  const auto m = static_cast<Eigen::Index>(bg.size());
  const auto w = bg.quad_weights();
  MetricState st = make_metric(bgp, normalized_integral_zero(bg, phi0));
  FlowTrajectory traj;
  traj.samples.push_back(sample(fs, st, 0));

  double time = 0;
  for (int step = 1; step <= steps; ++step) {
    const double target = step * dt;
    while (time < target - 1e-15) {
      double h = target - time;
      bool advanced = false;
      for (int halving = 0; halving <= opt.max_halvings && !advanced; ++halving, h /= 2) {
        // (I - h (Laplacian + 1)) delta = h (log rho + phi)
        Eigen::MatrixXd a = -h * bg.hessian_radial_matrix();
        for (Eigen::Index i = 0; i < m; ++i) {
          const auto u = static_cast<std::size_t>(i);
          a.row(i) /= st.omega.radial[u];
          if (bg.n() > 1) a.row(i) -= h * (bg.n() - 1) * bg.hessian_transverse_matrix().row(i) / st.omega.transverse[u];
          a(i, i) += 1 - h;
        }
        Eigen::VectorXd rhs(m);
        for (Eigen::Index i = 0; i < m; ++i) {
          const auto u = static_cast<std::size_t>(i);
          rhs(i) = h * (st.log_density[u] + st.potential.values[u]);
        }
        const Eigen::VectorXd delta = a.partialPivLu().solve(rhs);
        RadialPotential next = st.potential;
        for (Eigen::Index i = 0; i < m; ++i) next.values[static_cast<std::size_t>(i)] += delta(i);
        // the constant mode grows like e^t and carries no geometry
        double mean = 0;
        for (std::size_t i = 0; i < next.values.size(); ++i) mean += w[i] * next.values[i];
        mean /= bg.volume();
        for (double& v : next.values) v -= mean;
        next.normalization = Normalization::integral_zero;
        try {
          st = make_metric(bgp, std::move(next));
          time += h;
          advanced = true;
        } catch (const NotKahlerError&) {
        } catch (const ParameterError&) {
        }
      }
      if (!advanced) {
        traj.truncated = true;
        traj.reason = "positivity lost at t = " + std::to_string(time) + " after maximal step halving";
        return traj;
      }
    }
    time = target;
    if (step % opt.record_every == 0 || step == steps) traj.samples.push_back(sample(fs, st, time));
  }
  return traj;
}

}  // namespace kahler
