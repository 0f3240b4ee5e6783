#include "kahler/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

using namespace kahler;

namespace {

constexpr double pi = std::numbers::pi;

// Potential Phi(x) = a cos(pi x / r) + b cos(2 pi x / r) with analytic derivatives.
struct TestPotential {
  double a, b, r;
  double d(double x, int m) const
  {
    auto term = [&](double c, double w) {
      const double arg = w * x;
      switch (m % 4) {
        case 0: return c * std::pow(w, m) * std::cos(arg);
        case 1: return -c * std::pow(w, m) * std::sin(arg);
        case 2: return -c * std::pow(w, m) * std::cos(arg);
        default: return c * std::pow(w, m) * std::sin(arg);
      }
    };
    return term(a, pi / r) + term(b, 2 * pi / r);
  }
  RadialPotential sample(const Background& bg) const
  {
    RadialPotential p{std::vector<double>(bg.size()), Normalization::none};
    for (std::size_t i = 0; i < bg.size(); ++i) p.values[i] = d(bg.nodes()[i], 0);
    return p;
  }
};

// Kahler potential in t = log|z|^2: F(t) = r log(1 + e^t) + Phi(x(t)).
struct LogPolar {
  int n;
  TestPotential phi;
  double x(double t) const { return phi.r / (1 + std::exp(-t)); }
  double first(double t) const
  {
    const double xs = x(t), xp = xs * (phi.r - xs) / phi.r;
    return xs + phi.d(xs, 1) * xp;
  }
  double second(double t) const
  {
    const double xs = x(t), xp = xs * (phi.r - xs) / phi.r, xpp = xp * (phi.r - 2 * xs) / phi.r;
    return xp + phi.d(xs, 2) * xp * xp + phi.d(xs, 1) * xpp;
  }
  // Ricci potential: Ric = i ddbar G
  double g(double t) const { return -(n - 1) * std::log(first(t)) - std::log(second(t)) + n * t; }
  double g1(double t, double h) const
  {
    return (g(t - 2 * h) - 8 * g(t - h) + 8 * g(t + h) - g(t + 2 * h)) / (12 * h);
  }
  double g2(double t, double h) const
  {
    return (-g(t - 2 * h) + 16 * g(t - h) - 30 * g(t) + 16 * g(t + h) - g(t + 2 * h)) / (12 * h * h);
  }
};

double brute_mixed_volume(const std::vector<std::vector<double>>& rows)
{
  const std::size_t n = rows.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double s = 0, fact = 1;
  for (std::size_t i = 2; i <= n; ++i) fact *= double(i);
  do {
    double p = 1;
    for (std::size_t j = 0; j < n; ++j) p *= rows[j][perm[j]];
    s += p;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return s / fact;
}

}  // namespace

TEST_CASE("Fubini-Study anchors")
{
  for (int n = 1; n <= 4; ++n) {
    const auto bg = fs_background(Model::cpn, n, 128);
    const MetricState fs = make_metric(bg, RadialPotential::zero(*bg));
    CHECK(fs.einstein_deviation() < 1e-9);
    CHECK(bg->volume() == doctest::Approx(std::pow(2 * pi * (n + 1), n)).epsilon(1e-14));
    std::vector<double> one(bg->size(), 1.0);
    CHECK(bg->integrate(one) == doctest::Approx(bg->volume()).epsilon(1e-13));
    for (int k = 0; k <= n; ++k) {
      const auto s = sigma_k(fs, k);
      for (double v : s) CHECK(v == doctest::Approx(binomial(n, k)).epsilon(1e-9));
    }
    const auto f = ricci_potential(fs).f.values;
    for (double v : f) CHECK(std::abs(v) < 1e-9);
    // the moment coordinate is a first eigenfunction: Laplacian x = n - x
    std::vector<double> x(bg->nodes().begin(), bg->nodes().end());
    const auto lap = laplacian(fs, x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(lap[i] == doctest::Approx(n - x[i]).epsilon(1e-9));
  }
}

TEST_CASE("Ricci eigenvalues against finite differences in log-polar coordinates")
{
  for (int n = 1; n <= 3; ++n) {
    const TestPotential phi{0.15, -0.04, double(n + 1)};
    const auto bg = fs_background(Model::cpn, n, 128);
    const MetricState st = make_metric(bg, phi.sample(*bg));
    const LogPolar lp{n, phi};
    const auto f = ricci_potential(st).f.values;
    double offset = NAN;
    for (std::size_t i = 0; i < bg->size(); ++i) {
      const double x = bg->nodes()[i];
      if (x < 0.1 * phi.r || x > 0.9 * phi.r) continue;
      const double t = std::log(x / (phi.r - x));
      const double h = 1e-3;
      CAPTURE(n);
      CAPTURE(x);
      CHECK(st.moment[i] == doctest::Approx(lp.first(t)).epsilon(1e-12));
      const double rho = std::pow(lp.first(t) / x, n - 1) * lp.second(t) / (x * (phi.r - x) / phi.r);
      CHECK(st.density_ratio[i] == doctest::Approx(rho).epsilon(1e-11));
      CHECK(st.lambda_r[i] == doctest::Approx(lp.g2(t, h) / lp.second(t)).epsilon(1e-6));
      if (n > 1) CHECK(st.lambda_s[i] == doctest::Approx(lp.g1(t, h) / lp.first(t)).epsilon(1e-8));
      // Ric - omega = i ddbar f, so f - (G - F) is constant
      const double F = phi.r * std::log1p(std::exp(t)) + phi.d(x, 0);
      const double c = f[i] - (lp.g(t) - F);
      if (std::isnan(offset)) offset = c;
      CHECK(c == doctest::Approx(offset).epsilon(1e-8));
    }
  }
}

TEST_CASE("Laplacian against log-polar formula")
{
  const int n = 2;
  const TestPotential phi{0.1, 0.05, 3.0};
  const auto bg = fs_background(Model::cpn, n, 96);
  const MetricState st = make_metric(bg, phi.sample(*bg));
  const LogPolar lp{n, phi};
  std::vector<double> u(bg->size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = bg->nodes()[i] * bg->nodes()[i];
  const auto lap = laplacian(st, u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = bg->nodes()[i];
    if (x < 0.05 || x > 2.95) continue;
    const double t = std::log(x / (3 - x));
    const double xp = x * (3 - x) / 3, xpp = xp * (3 - 2 * x) / 3;
    const double ut = 2 * x * xp, utt = 2 * xp * xp + 2 * x * xpp;
    CHECK(lap[i] == doctest::Approx(utt / lp.second(t) + (n - 1) * ut / lp.first(t)).epsilon(1e-9));
  }
}

TEST_CASE("wedge density against brute-force mixed volumes")
{
  for (int n = 1; n <= 4; ++n) {
    const auto bg = fs_background(Model::cpn, n, 16);
    std::vector<FormSlot> forms(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      auto& f = forms[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < bg->size(); ++i) {
        f.radial.push_back(1.0 + 0.3 * j + 0.1 * double(i % 5));
        f.transverse.push_back(0.5 - 0.2 * j + 0.07 * double(i % 3));
      }
    }
    std::vector<const FormSlot*> slots;
    for (const auto& f : forms) slots.push_back(&f);
    const auto d = wedge_density(*bg, slots);
    for (std::size_t i = 0; i < bg->size(); ++i) {
      std::vector<std::vector<double>> rows;
      for (const auto& f : forms) {
        std::vector<double> diag(static_cast<std::size_t>(n), f.transverse.empty() ? 0.0 : f.transverse[i]);
        diag[0] = f.radial[i];
        rows.push_back(diag);
      }
      CHECK(d[i] == doctest::Approx(brute_mixed_volume(rows)).epsilon(1e-13));
    }
  }
}

TEST_CASE("sigma_k from the two Ricci eigenvalues")
{
  const int n = 3;
  const auto bg = fs_background(Model::cpn, n, 64);
  const MetricState st = make_metric(bg, TestPotential{0.2, 0.0, 4.0}.sample(*bg));
  for (int k = 0; k <= n; ++k) {
    const auto s = sigma_k(st, k);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double lr = st.lambda_r[i], ls = st.lambda_s[i];
      const double expect = binomial(n - 1, k) * std::pow(ls, k) + binomial(n - 1, k - 1) * std::pow(ls, k - 1) * lr;
      CHECK(s[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("grid refinement converges spectrally")
{
  const TestPotential phi{0.2, 0.05, 3.0};
  std::vector<double> values;
  for (std::size_t N : {32, 64, 128}) {
    const auto bg = fs_background(Model::cpn, 2, N);
    const MetricState st = make_metric(bg, phi.sample(*bg));
    std::vector<double> w(bg->size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = st.density_ratio[i] * st.log_density[i];
    values.push_back(bg->integrate(w));
  }
  CHECK(std::abs(values[2] - values[1]) < 1e-11);
}

TEST_CASE("torus model")
{
  const auto bg = fs_background(Model::torus, 1, 64);
  CHECK(bg->volume() == 1.0);
  const MetricState flat = make_metric(bg, RadialPotential::zero(*bg));
  for (double v : flat.ricci.radial) CHECK(std::abs(v) < 1e-14);
  RadialPotential p{std::vector<double>(bg->size()), Normalization::none};
  for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] = 0.01 * std::cos(2 * pi * bg->nodes()[i]);
  const MetricState st = make_metric(bg, p);
  for (std::size_t i = 0; i < p.values.size(); ++i)
    CHECK(st.density_ratio[i] == doctest::Approx(1 - 0.04 * pi * pi * std::cos(2 * pi * bg->nodes()[i])).epsilon(1e-12));
  CHECK(bg->integrate(st.density_ratio) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(ricci_potential(st), UnsupportedModelError);
}

TEST_CASE("invalid input")
{
  CHECK_THROWS_AS(Background(Model::cpn, 5, 64), ParameterError);
  CHECK_THROWS_AS(Background(Model::cpn, 2, 8), ParameterError);
  CHECK_THROWS_AS(Background(Model::torus, 2, 64), ParameterError);
  CHECK_THROWS_AS(model_from_string("sphere"), ParameterError);
  const auto bg = fs_background(Model::cpn, 1, 64);
  CHECK_THROWS_AS(make_metric(bg, TestPotential{3.0, 0.0, 2.0}.sample(*bg)), NotKahlerError);
  CHECK_THROWS_AS(make_metric(bg, RadialPotential{std::vector<double>(10, 0.0), Normalization::none}), ParameterError);
}
