#include "kahler/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kahler {

std::size_t standard_chop(std::span<const double> coeffs, double tol)
{
  const std::size_t n = coeffs.size();
  if (tol >= 1) return 1;
  if (n < 17) return n;

  // monotone envelope, normalized by its first entry
  std::vector<double> envelope(n);
  envelope[n - 1] = std::abs(coeffs[n - 1]);
  for (std::size_t j = n - 1; j-- > 0;)
    envelope[j] = std::max(std::abs(coeffs[j]), envelope[j + 1]);
  if (envelope[0] == 0) return 1;
  const double head = envelope[0];
  for (double& e : envelope) e /= head;

  // first point followed by a plateau (1-based indexing kept from the reference)
  std::size_t plateau_point = 0;
  std::size_t j2 = 0;
  for (std::size_t j = 2; j <= n; ++j) {
    j2 = static_cast<std::size_t>(std::lround(1.25 * static_cast<double>(j) + 5));
    if (j2 > n) return n;
    const double e1 = envelope[j - 1];
    const double e2 = envelope[j2 - 1];
    const double r = 3 * (1 - std::log(e1) / std::log(tol));
    if (e1 == 0 || e2 / e1 > r) {
      plateau_point = j - 1;
      break;
    }
  }
  if (plateau_point == 0) return n;
  if (envelope[plateau_point - 1] == 0) return plateau_point;

  const double floor_level = std::pow(tol, 7.0 / 6.0);
  std::size_t j3 = 0;
  for (double e : envelope)
    if (e >= floor_level) ++j3;
  if (j3 < j2) {
    j2 = j3 + 1;
    envelope[j2 - 1] = floor_level;
  }
  std::size_t best = 1;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < j2; ++i) {
    const double bias = (j2 > 1 ? static_cast<double>(i) / static_cast<double>(j2 - 1) : 0.0) *
                        (-1.0 / 3.0) * std::log10(tol);
    const double v = std::log10(envelope[i]) + bias;
    if (v < best_value) {
      best_value = v;
      best = i + 1;
    }
  }
  return std::max<std::size_t>(best - 1, 1);
}

// ---------------------------------------------------------------- Chebyshev

ChebyshevBasis::ChebyshevBasis(std::size_t points, double a, double b)
    : a_(a), b_(b), degree_(points - 1)
{
  if (points < 3 || !(b > a)) throw std::invalid_argument("ChebyshevBasis: bad grid");
  const std::size_t N = degree_;
  const double pi = std::numbers::pi;
  nodes_.resize(N + 1);
  for (std::size_t j = 0; j <= N; ++j) {
    // sine form keeps the nodes exactly symmetric
    const double xi = std::sin(pi * (2.0 * static_cast<double>(j) - static_cast<double>(N)) /
                               (2.0 * static_cast<double>(N)));
    nodes_[j] = 0.5 * (a + b) + 0.5 * (b - a) * xi;
  }
  nodes_.front() = a;
  nodes_.back() = b;

  to_values_.resize(N + 1, N + 1);
  for (std::size_t j = 0; j <= N; ++j)
    for (std::size_t k = 0; k <= N; ++k) {
      const double c = std::cos(pi * static_cast<double>((j * k) % (2 * N)) / static_cast<double>(N));
      to_values_(j, k) = (k % 2 == 0) ? c : -c;
    }
  to_coeffs_.resize(N + 1, N + 1);
  for (std::size_t k = 0; k <= N; ++k)
    for (std::size_t j = 0; j <= N; ++j) {
      double v = 2.0 / static_cast<double>(N) * to_values_(j, k);
      if (j == 0 || j == N) v *= 0.5;
      if (k == 0 || k == N) v *= 0.5;
      to_coeffs_(k, j) = v;
    }

  // Clenshaw-Curtis: integrate the interpolant exactly
  weights_.assign(N + 1, 0.0);
  for (std::size_t k = 0; k <= N; k += 2) {
    const double moment = 2.0 / (1.0 - static_cast<double>(k * k));
    for (std::size_t j = 0; j <= N; ++j) weights_[j] += moment * to_coeffs_(k, j);
  }
  for (double& w : weights_) w *= 0.5 * (b - a);
}

std::vector<double> ChebyshevBasis::to_coefficients(std::span<const double> values) const
{
  Eigen::Map<const Eigen::VectorXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
  Eigen::VectorXd c = to_coeffs_ * v;
  return {c.data(), c.data() + c.size()};
}

std::vector<double> ChebyshevBasis::to_values(std::span<const double> coeffs) const
{
  Eigen::Map<const Eigen::VectorXd> c(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  Eigen::VectorXd v = to_values_ * c;
  return {v.data(), v.data() + v.size()};
}

double ChebyshevBasis::evaluate(std::span<const double> coeffs, double x) const
{
  const double xi = (2 * x - a_ - b_) / (b_ - a_);
  double b1 = 0, b2 = 0;
  for (std::size_t k = coeffs.size(); k-- > 1;) {
    const double b0 = coeffs[k] + 2 * xi * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs[0] + xi * b1 - b2;
}

std::vector<double> ChebyshevBasis::differentiate_coefficients(std::span<const double> c) const
{
  const std::size_t n = c.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  // d_{k-1} = d_{k+1} + 2k c_k, with the k = 1 term halved into d_0
  for (std::size_t k = n - 1; k >= 1; --k) {
    const double next = (k + 1 < n) ? d[k + 1] : 0.0;
    d[k - 1] = next + 2.0 * static_cast<double>(k) * c[k];
  }
  d[0] *= 0.5;
  const double scale = 2.0 / (b_ - a_);
  for (double& v : d) v *= scale;
  return d;
}

Derivatives ChebyshevBasis::derivatives(std::span<const double> values, int max_order) const
{
  Derivatives out;
  out.order.reserve(static_cast<std::size_t>(max_order) + 1);
  out.order.emplace_back(values.begin(), values.end());
  std::vector<double> c = to_coefficients(values);
  // the mean does not enter any derivative; keep it out of the chop decision
  std::vector<double> shape = c;
  shape[0] = 0.0;
  const std::size_t keep = standard_chop(shape);
  std::fill(c.begin() + static_cast<std::ptrdiff_t>(keep), c.end(), 0.0);
  out.kept_modes = keep;
  for (int m = 1; m <= max_order; ++m) {
    c = differentiate_coefficients(c);
    out.order.push_back(to_values(c));
  }
  return out;
}

double ChebyshevBasis::interpolate(std::span<const double> values, double x) const
{
  std::vector<double> c = to_coefficients(values);
  c.resize(standard_chop(c));
  return evaluate(c, x);
}

std::vector<double> ChebyshevBasis::antiderivative(std::span<const double> values) const
{
  const std::vector<double> c = to_coefficients(values);
  const std::size_t n = c.size();
  auto coef = [&](std::size_t k) { return k < n ? c[k] : 0.0; };
  std::vector<double> b(n + 1, 0.0);
  b[1] = coef(0) - 0.5 * coef(2);
  for (std::size_t k = 2; k <= n; ++k)
    b[k] = (coef(k - 1) - coef(k + 1)) / (2.0 * static_cast<double>(k));
  // vanish at the left end, where T_k = (-1)^k
  double left = 0;
  for (std::size_t k = 1; k <= n; ++k) left += (k % 2 == 0) ? b[k] : -b[k];
  b[0] = -left;
  // the degree-N+1 term is dropped; it is at rounding level for resolved input
  b.resize(n);
  const double scale = 0.5 * (b_ - a_);
  for (double& v : b) v *= scale;
  return to_values(b);
}

Eigen::MatrixXd ChebyshevBasis::differentiation_matrix(int order) const
{
  const auto n = static_cast<Eigen::Index>(degree_ + 1);
  Eigen::MatrixXd coeff_diff = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd single(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(k)] = 1.0;
    const std::vector<double> d = differentiate_coefficients(e);
    for (Eigen::Index i = 0; i < n; ++i) single(i, k) = d[static_cast<std::size_t>(i)];
  }
  for (int m = 0; m < order; ++m) coeff_diff = single * coeff_diff;
  return to_values_ * coeff_diff * to_coeffs_;
}

double ChebyshevBasis::tail_ratio(std::span<const double> values) const
{
  const std::vector<double> c = to_coefficients(values);
  double head = 0, tail = 0;
  const std::size_t start = c.size() - std::max<std::size_t>(c.size() / 10, 1);
  for (std::size_t k = 0; k < c.size(); ++k) {
    head = std::max(head, std::abs(c[k]));
    if (k >= start) tail = std::max(tail, std::abs(c[k]));
  }
  return tail / std::max(head, 1.0);
}

// ------------------------------------------------------------------ Fourier

FourierBasis::FourierBasis(std::size_t points, double period) : period_(period)
{
  if (points < 8 || points % 2 != 0 || !(period > 0))
    throw std::invalid_argument("FourierBasis: need an even number of points");
  nodes_.resize(points);
  for (std::size_t j = 0; j < points; ++j)
    nodes_[j] = period * static_cast<double>(j) / static_cast<double>(points);
  weights_.assign(points, period / static_cast<double>(points));
  const std::size_t half = points / 2;
  cos_table_.resize((half + 1) * points);
  sin_table_.resize((half + 1) * points);
  const double w = 2 * std::numbers::pi / static_cast<double>(points);
  for (std::size_t k = 0; k <= half; ++k)
    for (std::size_t j = 0; j < points; ++j) {
      const double arg = w * static_cast<double>((k * j) % points);
      cos_table_[k * points + j] = std::cos(arg);
      sin_table_[k * points + j] = std::sin(arg);
    }
}

FourierBasis::Modes FourierBasis::analyze(std::span<const double> values) const
{
  const std::size_t N = nodes_.size();
  const std::size_t half = N / 2;
  Modes m;
  m.cos_part.assign(half + 1, 0.0);
  m.sin_part.assign(half + 1, 0.0);
  for (std::size_t k = 0; k <= half; ++k) {
    double a = 0, b = 0;
    for (std::size_t j = 0; j < N; ++j) {
      a += values[j] * cos_table_[k * N + j];
      b += values[j] * sin_table_[k * N + j];
    }
    const double scale = (k == 0 || k == half) ? 1.0 / static_cast<double>(N) : 2.0 / static_cast<double>(N);
    m.cos_part[k] = a * scale;
    m.sin_part[k] = (k == 0 || k == half) ? 0.0 : b * scale;
  }
  return m;
}

std::vector<double> FourierBasis::synthesize(const Modes& m) const
{
  const std::size_t N = nodes_.size();
  std::vector<double> v(N, 0.0);
  for (std::size_t k = 0; k < m.cos_part.size(); ++k) {
    const double a = m.cos_part[k], b = m.sin_part[k];
    if (a == 0 && b == 0) continue;
    for (std::size_t j = 0; j < N; ++j) v[j] += a * cos_table_[k * N + j] + b * sin_table_[k * N + j];
  }
  return v;
}

Derivatives FourierBasis::derivatives(std::span<const double> values, int max_order) const
{
  Derivatives out;
  out.order.emplace_back(values.begin(), values.end());
  Modes m = analyze(values);
  const std::size_t half = m.cos_part.size() - 1;
  std::vector<double> magnitude(half + 1);
  for (std::size_t k = 1; k <= half; ++k) magnitude[k] = std::hypot(m.cos_part[k], m.sin_part[k]);
  magnitude[0] = 0.0;
  const std::size_t keep = std::min(standard_chop(magnitude), half);  // Nyquist never kept
  for (std::size_t k = keep; k <= half; ++k) m.cos_part[k] = m.sin_part[k] = 0.0;
  out.kept_modes = keep;
  for (int order = 1; order <= max_order; ++order) {
    for (std::size_t k = 0; k <= half; ++k) {
      const double omega = 2 * std::numbers::pi * static_cast<double>(k) / period_;
      const double a = m.cos_part[k], b = m.sin_part[k];
      m.cos_part[k] = omega * b;
      m.sin_part[k] = -omega * a;
    }
    out.order.push_back(synthesize(m));
  }
  return out;
}

double FourierBasis::interpolate(std::span<const double> values, double x) const
{
  const Modes m = analyze(values);
  double s = 0;
  for (std::size_t k = 0; k < m.cos_part.size(); ++k) {
    const double arg = 2 * std::numbers::pi * static_cast<double>(k) * x / period_;
    s += m.cos_part[k] * std::cos(arg) + m.sin_part[k] * std::sin(arg);
  }
  return s;
}

std::vector<double> FourierBasis::antiderivative(std::span<const double>) const
{
  throw std::logic_error("FourierBasis: antiderivative of a periodic function is not periodic");
}

Eigen::MatrixXd FourierBasis::differentiation_matrix(int order) const
{
  const std::size_t N = nodes_.size();
  Eigen::MatrixXd D(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  const std::size_t half = N / 2;
  for (std::size_t col = 0; col < N; ++col) {
    std::vector<double> e(N, 0.0);
    e[col] = 1.0;
    Modes m = analyze(e);
    m.cos_part[half] = m.sin_part[half] = 0.0;
    for (int o = 0; o < order; ++o)
      for (std::size_t k = 0; k <= half; ++k) {
        const double omega = 2 * std::numbers::pi * static_cast<double>(k) / period_;
        const double a = m.cos_part[k], b = m.sin_part[k];
        m.cos_part[k] = omega * b;
        m.sin_part[k] = -omega * a;
      }
    const std::vector<double> v = synthesize(m);
    for (std::size_t i = 0; i < N; ++i)
      D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = v[i];
  }
  return D;
}

double FourierBasis::tail_ratio(std::span<const double> values) const
{
  const Modes m = analyze(values);
  const std::size_t half = m.cos_part.size() - 1;
  const std::size_t start = half + 1 - std::max<std::size_t>((half + 1) / 10, 1);
  double head = 0, tail = 0;
  for (std::size_t k = 0; k <= half; ++k) {
    const double mag = std::hypot(m.cos_part[k], m.sin_part[k]);
    head = std::max(head, mag);
    if (k >= start) tail = std::max(tail, mag);
  }
  return tail / std::max(head, 1.0);
}

}  // namespace kahler
