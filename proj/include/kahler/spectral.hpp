#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace kahler {

/// Number of coefficients worth keeping in a Chebyshev-like series whose
/// magnitudes are given in `coeffs` (ordered by degree). Detects the
/// rounding plateau and cuts in front of it; returns coeffs.size() when the
/// series is not resolved. Aurentz-Trefethen "standard chop".
std::size_t standard_chop(std::span<const double> coeffs, double tol = 2.220446049250313e-16);

/// Derivatives of a sampled function at the grid nodes: `order[m]` holds the
/// m-th derivative (order[0] is the input itself).
struct Derivatives {
  std::vector<std::vector<double>> order;
  std::size_t kept_modes = 0;
  const std::vector<double>& operator[](std::size_t m) const { return order[m]; }
};

/// 1D spectral discretization shared by the model manifolds.
class SpectralBasis {
 public:
  virtual ~SpectralBasis() = default;

  virtual std::span<const double> nodes() const = 0;
  /// Plain quadrature weights for dx on the interval.
  virtual std::span<const double> weights() const = 0;
  virtual std::size_t size() const = 0;

  /// Derivatives up to `max_order` computed in coefficient space after
  /// chopping the rounding plateau.
  virtual Derivatives derivatives(std::span<const double> values, int max_order) const = 0;
  /// Value of the interpolant at an arbitrary point of the domain.
  virtual double interpolate(std::span<const double> values, double x) const = 0;
  /// Antiderivative vanishing at the left end (non-periodic bases only).
  virtual std::vector<double> antiderivative(std::span<const double> values) const = 0;
  /// Dense derivative matrix of the given order (no chopping).
  virtual Eigen::MatrixXd differentiation_matrix(int order) const = 0;
  /// Largest coefficient magnitude in the top tenth of the spectrum, relative
  /// to the largest coefficient (or to 1 when all coefficients are smaller).
  /// Small for resolved functions.
  virtual double tail_ratio(std::span<const double> values) const = 0;
};

/// Chebyshev-Lobatto grid on [a, b], nodes increasing.
class ChebyshevBasis final : public SpectralBasis {
 public:
  ChebyshevBasis(std::size_t points, double a, double b);

  std::span<const double> nodes() const override { return nodes_; }
  std::span<const double> weights() const override { return weights_; }
  std::size_t size() const override { return nodes_.size(); }

  std::vector<double> to_coefficients(std::span<const double> values) const;
  std::vector<double> to_values(std::span<const double> coeffs) const;
  /// Clenshaw evaluation of a coefficient vector at x in [a, b].
  double evaluate(std::span<const double> coeffs, double x) const;
  /// Coefficients of d/dx (same length as the input, last entry zero).
  std::vector<double> differentiate_coefficients(std::span<const double> coeffs) const;

  Derivatives derivatives(std::span<const double> values, int max_order) const override;
  double interpolate(std::span<const double> values, double x) const override;
  std::vector<double> antiderivative(std::span<const double> values) const override;
  Eigen::MatrixXd differentiation_matrix(int order) const override;
  double tail_ratio(std::span<const double> values) const override;

  double left() const { return a_; }
  double right() const { return b_; }

 private:
  double a_, b_;
  std::size_t degree_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  Eigen::MatrixXd to_coeffs_;  // values -> coefficients
  Eigen::MatrixXd to_values_;  // coefficients -> values
};

/// Uniform periodic grid on [0, period).
class FourierBasis final : public SpectralBasis {
 public:
  FourierBasis(std::size_t points, double period);

  std::span<const double> nodes() const override { return nodes_; }
  std::span<const double> weights() const override { return weights_; }
  std::size_t size() const override { return nodes_.size(); }

  Derivatives derivatives(std::span<const double> values, int max_order) const override;
  double interpolate(std::span<const double> values, double x) const override;
  std::vector<double> antiderivative(std::span<const double> values) const override;
  Eigen::MatrixXd differentiation_matrix(int order) const override;
  double tail_ratio(std::span<const double> values) const override;

 private:
  struct Modes {
    std::vector<double> cos_part, sin_part;  // index = wavenumber 0..points/2
  };
  Modes analyze(std::span<const double> values) const;
  std::vector<double> synthesize(const Modes& m) const;

  double period_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> cos_table_, sin_table_;  // [wavenumber * points + node]
};

}  // namespace kahler
