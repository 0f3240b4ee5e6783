#pragma once

// Radial Kahler metrics on CP^n and periodic metrics on a flat torus.
//
// On CP^n a U(n)-invariant metric in 2 pi c_1 is described in the moment
// coordinate x in [0, n+1] of the Fubini-Study metric. Every radial (1,1)-form
// is simultaneously diagonal with one radial eigenvalue and one transverse
// eigenvalue of multiplicity n-1; FormSlot stores both relative to the
// Fubini-Study form. For a radial function u(x),
//
//   i ddbar u      ~  ( (w0 u')',  (w0/x) u' ),      w0 = x (n+1-x)/(n+1)
//   i du ^ dbar u  ~  ( w0 u'^2,   0 )
//
// and integrals over M reduce to integrals over x against n (2 pi)^n x^{n-1} dx.
// The torus model is C/(Z + 2iZ) with omega = dx^dy/2 and potentials depending
// on x only, so that omega_phi = (1 + phi'') omega and V = 1.

#include "kahler/errors.hpp"
#include "kahler/spectral.hpp"

#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace kahler {

enum class Model { cpn, torus };

std::string_view to_string(Model m);
Model model_from_string(std::string_view s);

enum class FormKind { reference_metric, perturbed_metric, ricci_of_perturbed, hessian_of, gradient_square_of };

/// A radial (1,1)-form: eigenvalue pair per node relative to the reference volume frame.
struct FormSlot {
  FormKind kind = FormKind::reference_metric;
  std::vector<double> radial;
  std::vector<double> transverse;  // unused when n == 1
};

class Background {
 public:
  Background(Model model, int n, std::size_t grid_size);

  Model model() const { return model_; }
  int n() const { return n_; }
  /// Length of the moment interval: n + 1 on CP^n, the period on the torus.
  double moment_length() const { return length_; }
  std::size_t size() const { return basis_->size(); }
  std::span<const double> nodes() const { return basis_->nodes(); }
  /// Weights for integrals against the reference volume form omega^n.
  std::span<const double> quad_weights() const { return quad_weights_; }
  /// Fubini-Study profile w0(x) = dx/dt (empty for the torus).
  std::span<const double> fs_profile() const { return fs_profile_; }
  double volume() const { return volume_; }
  const SpectralBasis& basis() const { return *basis_; }

  FormSlot reference_metric() const;
  FormSlot reference_ricci() const;
  FormSlot hessian(std::span<const double> u) const;
  FormSlot hessian(const Derivatives& d) const;
  FormSlot gradient_square(std::span<const double> u) const;
  FormSlot gradient_square(const Derivatives& d) const;

  /// Integral against omega^n; fixed summation order.
  double integrate(std::span<const double> density) const;

  /// Collocation matrices A_r, A_s with hessian(u) = (A_r u, A_s u).
  const Eigen::MatrixXd& hessian_radial_matrix() const { return hess_radial_; }
  const Eigen::MatrixXd& hessian_transverse_matrix() const { return hess_transverse_; }
  const Eigen::MatrixXd& first_derivative_matrix() const { return d1_; }

 private:
  Model model_;
  int n_;
  double length_;
  double volume_;
  std::unique_ptr<SpectralBasis> basis_;
  std::vector<double> quad_weights_;
  std::vector<double> fs_profile_;
  Eigen::MatrixXd d1_, hess_radial_, hess_transverse_;
};

using BackgroundPtr = std::shared_ptr<const Background>;

enum class Normalization { none, integral_zero, sup_zero };

/// A Kahler potential sampled on the background grid.
struct RadialPotential {
  std::vector<double> values;
  Normalization normalization = Normalization::none;

  static RadialPotential zero(const Background& bg);
};

RadialPotential operator+(const RadialPotential& a, const RadialPotential& b);
RadialPotential operator-(const RadialPotential& a, const RadialPotential& b);
RadialPotential operator*(double c, const RadialPotential& a);
RadialPotential shifted(const RadialPotential& a, double c);
/// Normalize so that the integral against omega^n vanishes.
RadialPotential normalized_integral_zero(const Background& bg, RadialPotential a);
double oscillation(const RadialPotential& a);

/// A validated metric omega_phi = omega_FS + i ddbar(phi); all forms are stored
/// relative to the background reference metric.
struct MetricState {
  BackgroundPtr background;
  RadialPotential potential;          // relative to the background
  std::vector<double> moment;         // x_phi at each node (cpn) / node (torus)
  std::vector<double> profile;        // w_phi = dx_phi / dt (cpn) / density (torus)
  std::vector<double> density_ratio;  // omega_phi^n / omega^n
  std::vector<double> log_density;
  FormSlot omega;                     // omega_phi
  FormSlot ricci;                     // Ric(omega_phi)
  std::vector<double> lambda_r;       // Ricci eigenvalues relative to omega_phi
  std::vector<double> lambda_s;
  std::size_t kept_modes = 0;

  const Background& bg() const { return *background; }
  double min_ricci() const;
  /// max |lambda - 1| over nodes and both eigenvalues.
  double einstein_deviation() const;
};

struct RicciPair {
  std::vector<double> radial;
  std::vector<double> transverse;
};

struct RicciPotential {
  RadialPotential f;
  double defect = 0;
};

BackgroundPtr fs_background(Model model, int n, std::size_t grid_size);

/// Threshold on the spectral tail below which a potential counts as resolved.
inline constexpr double kResolvedTail = 1e-8;

MetricState make_metric(BackgroundPtr bg, RadialPotential phi);
RicciPair ricci_eigenvalues(const MetricState& state);
std::vector<double> sigma_k(const MetricState& state, int k);
std::vector<double> laplacian(const MetricState& state, std::span<const double> u);
RicciPotential ricci_potential(const MetricState& state);
/// Density of slot_1 ^ ... ^ slot_n relative to omega^n.
std::vector<double> wedge_density(const Background& bg, std::span<const FormSlot* const> slots);
std::vector<double> wedge_density(const Background& bg, std::initializer_list<const FormSlot*> slots);
double integrate(const Background& bg, std::span<const double> density);

/// Slot list holding `a` copies of the first form, `b` of the second, and so on.
std::vector<const FormSlot*> repeat_slots(std::initializer_list<std::pair<const FormSlot*, int>> parts);

double binomial(int n, int k);

}  // namespace kahler
