#include "kahler/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kahler;

TEST_CASE("Clenshaw-Curtis weights integrate polynomials exactly")
{
  const ChebyshevBasis b(17, 0.0, 3.0);
  for (int p = 0; p <= 15; ++p) {
    double s = 0;
    for (std::size_t i = 0; i < b.size(); ++i) s += b.weights()[i] * std::pow(b.nodes()[i], p);
    CHECK(s == doctest::Approx(std::pow(3.0, p + 1) / (p + 1)).epsilon(1e-13));
  }
}

TEST_CASE("Chebyshev derivatives of a smooth function")
{
  const ChebyshevBasis b(48, -1.0, 2.0);
  std::vector<double> f(b.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(std::sin(b.nodes()[i]));
  const Derivatives d = b.derivatives(f, 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = b.nodes()[i];
    CHECK(d[1][i] == doctest::Approx(std::cos(x) * f[i]).epsilon(1e-11));
    CHECK(d[2][i] == doctest::Approx((std::cos(x) * std::cos(x) - std::sin(x)) * f[i]).epsilon(1e-9));
  }
  CHECK(d.kept_modes < b.size());
}

TEST_CASE("interpolation and antiderivative")
{
  const ChebyshevBasis b(32, 0.0, 1.0);
  std::vector<double> f(b.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::cos(3 * b.nodes()[i]);
  CHECK(b.interpolate(f, 0.37) == doctest::Approx(std::cos(1.11)).epsilon(1e-13));
  const auto F = b.antiderivative(f);
  CHECK(F.front() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(F.back() == doctest::Approx(std::sin(3.0) / 3).epsilon(1e-13));
}

TEST_CASE("standard chop finds the rounding plateau")
{
  std::vector<double> c;
  for (int k = 0; k < 40; ++k) c.push_back(k < 20 ? std::pow(10.0, -0.8 * k) : 1e-17);
  const auto kept = standard_chop(c);
  CHECK(kept > 15);
  CHECK(kept < 25);
  std::vector<double> flat(40, 1.0);
  CHECK(standard_chop(flat) == flat.size());
}

TEST_CASE("Fourier derivatives and interpolation")
{
  const FourierBasis b(32, 1.0);
  std::vector<double> f(b.size());
  const double w = 2 * std::numbers::pi;
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(w * b.nodes()[i]) + 0.5 * std::cos(3 * w * b.nodes()[i]);
  const Derivatives d = b.derivatives(f, 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = b.nodes()[i];
    CHECK(d[1][i] == doctest::Approx(w * std::cos(w * x) - 1.5 * w * std::sin(3 * w * x)).epsilon(1e-11));
  }
  CHECK(b.interpolate(f, 0.123) ==
        doctest::Approx(std::sin(w * 0.123) + 0.5 * std::cos(3 * w * 0.123)).epsilon(1e-12));
  CHECK_THROWS(b.antiderivative(f));
}

TEST_CASE("differentiation matrix agrees with coefficient differentiation")
{
  const ChebyshevBasis b(24, 0.0, 2.0);
  std::vector<double> f(b.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(b.nodes()[i], 5);
  const Eigen::MatrixXd D = b.differentiation_matrix(1);
  const Eigen::VectorXd df = D * Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(df[static_cast<Eigen::Index>(i)] == doctest::Approx(5 * std::pow(b.nodes()[i], 4)).epsilon(1e-10));
}
