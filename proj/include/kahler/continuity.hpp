#pragma once

// Continuity paths for radial Monge-Ampere equations on CP^n and the
// identities they satisfy.
//
//   Yau path:    omega_psi^n = e^{t f + c_t} omega^n,  Int psi omega^n = 0
//   Aubin path:  omega_phi^n = e^{-t phi + f} omega^n
//
// Here omega is a reference metric (a MetricState over the Fubini-Study
// background) and f its Ricci potential. Path potentials are stored relative
// to omega.

#include "kahler/check_report.hpp"
#include "kahler/functionals.hpp"
#include "kahler/geometry.hpp"

#include <span>
#include <string>
#include <vector>

namespace kahler {

struct PathMonitors {
  double lambda1_radial = 0;
  double i = 0, j = 0, i_minus_j = 0;
  double min_ricci = 0;
  std::vector<double> e_k;  // E_k(omega, omega_t), k = 0..n
};

struct PathPoint {
  double t = 0;
  RadialPotential potential;  // relative to the reference metric
  MetricState state;
  double c_t = 0;
  PathMonitors monitors;
  int iterations = 0;
  double residual = 0;        // max-node residual of the path equation
  std::string method;         // "quadrature", "fixed_point" or "newton"
};

enum class Termination { completed, stalled };

struct PathTrajectory {
  MetricState reference;
  RadialPotential ricci_potential;
  std::vector<PathPoint> points;
  Termination termination = Termination::completed;
  double stall_t = 0;
  std::string reason;

  bool completed() const { return termination == Termination::completed; }
};

struct PathOptions {
  bool monitors = true;
  double tolerance = 1e-11;
  int max_fixed_point = 50;
  int max_newton = 40;
  int max_bisections = 6;
};

/// Uniform grid 0, h, 2h, ..., 1.
std::vector<double> uniform_t_grid(double step);

/// Potential (relative to the background, integral zero against omega_FS^n)
/// whose Monge-Ampere density relative to omega_FS^n is `density`. The target
/// is rescaled to total volume V first. Radial moment inversion, no iteration.
RadialPotential solve_prescribed_density(BackgroundPtr bg, std::span<const double> density);

PathTrajectory solve_yau_path(const MetricState& ref, std::span<const double> t_grid, const PathOptions& opt = {});
PathTrajectory solve_aubin_path(const MetricState& ref, std::span<const double> t_grid, const PathOptions& opt = {});

/// d/dt of the path potentials by 5-point Lagrange differentiation in t.
std::vector<std::vector<double>> time_derivatives(const PathTrajectory& traj);
/// Quadrature in t over the trajectory points with t in [a, b] (piecewise quadratic).
double integrate_in_t(const PathTrajectory& traj, std::span<const double> values, double a, double b);

/// Smallest nonzero eigenvalue of -Laplacian on radial functions (radial sector only).
double lambda1_radial(const MetricState& state);

/// Compares d/dt (I - J) with -(1/V) Int phi Laplacian(phi_dot) omega_phi^n along the path.
CheckReport d_dt_i_minus_j_check(const PathTrajectory& traj);
/// Pointwise Aubin-path identities: linearized equation, Ricci identity, lambda_1 and I - J growth.
CheckReport check_aubin_trajectory(const PathTrajectory& traj);
/// Energy change between the Aubin endpoints against its explicit formula.
CheckReport check_aubin_energy_change(const PathTrajectory& traj, int k);
/// Yau path: linearized equation and the explicit formula for E_k at the endpoint.
CheckReport check_yau_endpoint_energy(const MetricState& ref, int k, std::span<const double> t_grid);
CheckReport check_yau_endpoint_energy(const PathTrajectory& yau, int k);
/// Properness chain for omega = omega_FS + i ddbar theta.
CheckReport check_properness_chain(BackgroundPtr bg, const RadialPotential& theta, std::span<const double> t_grid);
CheckReport check_properness_chain(const PathTrajectory& aubin, const PathTrajectory& yau);

/// omega_alpha with omega_alpha^n = e^{alpha f + c} omega^n, f the Ricci potential of `tilde`.
MetricState ricci_positive_generator(const MetricState& tilde, double alpha);

}  // namespace kahler
