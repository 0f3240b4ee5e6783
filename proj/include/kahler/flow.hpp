#pragma once

// Normalized Kahler-Ricci flow d/dt omega = -Ric(omega) + omega written for the
// potential relative to omega_FS:  phi_dot = log(omega_phi^n / omega^n) + phi.

#include "kahler/geometry.hpp"

#include <string>
#include <vector>

namespace kahler {

struct FlowSample {
  double time = 0;
  RadialPotential potential;
  double e0 = 0;
  double e1 = 0;
  double min_ricci = 0;
  bool ricci_plus_metric_nonnegative = true;  // min Ricci eigenvalue >= -1
  double volume_error = 0;                    // |Int omega_phi^n / V - 1|
  double einstein_deviation = 0;
};

struct FlowTrajectory {
  std::vector<FlowSample> samples;
  bool truncated = false;
  std::string reason;
};

struct FlowOptions {
  int record_every = 1;
  int max_halvings = 8;
};

/// Linearly implicit Euler steps of size dt (halved locally on loss of positivity).
FlowTrajectory run_flow(BackgroundPtr bg, const RadialPotential& phi0, double dt, int steps, const FlowOptions& opt = {});

}  // namespace kahler
