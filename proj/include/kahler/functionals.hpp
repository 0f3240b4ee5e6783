#pragma once

// Energy functionals on radial metrics. Every functional takes a reference
// metric (a MetricState over the background) and a potential relative to it;
// the overloads taking a BackgroundPtr use the Fubini-Study reference.

#include "kahler/geometry.hpp"

#include <span>
#include <vector>

namespace kahler {

enum class PathKind { linear, quadratic };
enum class EnergyMethod { path, closed_form };

struct EnergyValue {
  double value = 0;
  int k = 0;
  EnergyMethod method = EnergyMethod::closed_form;
  int path_resolution = 0;  // number of s-intervals (0 for the closed form)
  double estimated_error = 0;
};

struct FutakiValue {
  int k = 0;
  double value = 0;
  double spread = 0;
  std::vector<double> per_probe;
};

struct AubinYau {
  double i = 0;
  double j = 0;
  double i_minus_j = 0;
};

MetricState reference_state(BackgroundPtr bg);

/// Int Ric^{k+1} ^ omega^{n-k-1} / V for the reference metric. For k = n the
/// ratio Ric^n / omega^n is used instead; it only ever appears multiplied by n - k.
double mu_k(const MetricState& ref, int k);
double mu_k(BackgroundPtr bg, int k);

EnergyValue e_k_path(const MetricState& ref, const RadialPotential& phi, int k, PathKind kind);
EnergyValue e_k_path(BackgroundPtr bg, const RadialPotential& phi, int k, PathKind kind);
EnergyValue e_k_closed(const MetricState& ref, const RadialPotential& phi, int k);
EnergyValue e_k_closed(BackgroundPtr bg, const RadialPotential& phi, int k);
/// Closed form with the perturbed state already built.
double e_k_closed(const MetricState& ref, const MetricState& state, int k);

AubinYau i_j(const MetricState& ref, const RadialPotential& phi);
AubinYau i_j(BackgroundPtr bg, const RadialPotential& phi);
AubinYau i_j(const MetricState& ref, const MetricState& state);

/// sigma_{k+1} - Laplacian(sigma_k) - C(n, k+1) mu_k at every node.
std::vector<double> critical_residual(const MetricState& state, int k);

/// F_k(X) for the radial field z d/dz, evaluated on each probe metric.
FutakiValue futaki_k(std::span<const MetricState> probes, int k);
/// Holomorphy potential of z d/dz for the given metric (its moment map).
std::vector<double> radial_field_potential(const MetricState& state);
/// Potential (relative to the background) of the pullback of `state` by z -> e^s z.
RadialPotential orbit_pullback(const MetricState& state, double s);

/// E_1 on the flat torus in Dirichlet form: Int |d log(omega_phi/omega)|^2 / V.
double e1_cy(BackgroundPtr torus, const RadialPotential& phi);

}  // namespace kahler
