#include "kahler/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace kahler {

std::string_view to_string(Model m)
{
  return m == Model::cpn ? "cpn" : "torus";
}

Model model_from_string(std::string_view s)
{
  if (s == "cpn") return Model::cpn;
  if (s == "torus") return Model::torus;
  throw ParameterError("unknown model '" + std::string(s) + "'");
}

double binomial(int n, int k)
{
  if (k < 0 || n < 0 || k > n) return 0.0;
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// ------------------------------------------------------------------ Background

Background::Background(Model model, int n, std::size_t grid_size) : model_(model), n_(n)
{
  if (grid_size < 16) throw ParameterError("grid_size must be at least 16");
  if (model == Model::cpn) {
    if (n < 1 || n > 4) throw ParameterError("cpn model supports 1 <= n <= 4");
    length_ = n + 1.0;
    basis_ = std::make_unique<ChebyshevBasis>(grid_size, 0.0, length_);
    const double c = n * std::pow(2 * std::numbers::pi, n);
    volume_ = std::pow(2 * std::numbers::pi * length_, n);
    const auto x = basis_->nodes();
    const auto w = basis_->weights();
    quad_weights_.resize(x.size());
    fs_profile_.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      quad_weights_[i] = c * std::pow(x[i], n - 1) * w[i];
      fs_profile_[i] = x[i] * (length_ - x[i]) / length_;
    }
    d1_ = basis_->differentiation_matrix(1);
    const Eigen::MatrixXd d2 = basis_->differentiation_matrix(2);
    const auto m = static_cast<Eigen::Index>(x.size());
    hess_radial_.resize(m, m);
    hess_transverse_.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double xi = x[static_cast<std::size_t>(i)];
      const double w0 = fs_profile_[static_cast<std::size_t>(i)];
      const double w0p = (length_ - 2 * xi) / length_;
      const double v = (length_ - xi) / length_;
      hess_radial_.row(i) = w0p * d1_.row(i) + w0 * d2.row(i);
      hess_transverse_.row(i) = v * d1_.row(i);
    }
  } else {
    if (n != 1) throw ParameterError("torus model supports n = 1 only");
    if (grid_size % 2 != 0) throw ParameterError("torus grid_size must be even");
    length_ = 1.0;
    volume_ = 1.0;
    basis_ = std::make_unique<FourierBasis>(grid_size, length_);
    const auto w = basis_->weights();
    quad_weights_.assign(w.begin(), w.end());
    d1_ = basis_->differentiation_matrix(1);
    hess_radial_ = basis_->differentiation_matrix(2);
    hess_transverse_ = Eigen::MatrixXd::Zero(hess_radial_.rows(), hess_radial_.cols());
  }
}

FormSlot Background::reference_metric() const
{
  return {FormKind::reference_metric, std::vector<double>(size(), 1.0), std::vector<double>(size(), 1.0)};
}

FormSlot Background::reference_ricci() const
{
  const double v = model_ == Model::cpn ? 1.0 : 0.0;
  return {FormKind::ricci_of_perturbed, std::vector<double>(size(), v), std::vector<double>(size(), v)};
}

FormSlot Background::hessian(std::span<const double> u) const
{
  return hessian(basis_->derivatives(u, 2));
}

FormSlot Background::hessian(const Derivatives& d) const
{
  FormSlot out{FormKind::hessian_of, std::vector<double>(size()), std::vector<double>(size(), 0.0)};
  if (model_ == Model::torus) {
    out.radial = d[2];
    return out;
  }
  const auto x = nodes();
  for (std::size_t i = 0; i < size(); ++i) {
    const double w0p = (length_ - 2 * x[i]) / length_;
    out.radial[i] = w0p * d[1][i] + fs_profile_[i] * d[2][i];
    out.transverse[i] = (length_ - x[i]) / length_ * d[1][i];
  }
  return out;
}

FormSlot Background::gradient_square(std::span<const double> u) const
{
  return gradient_square(basis_->derivatives(u, 1));
}

FormSlot Background::gradient_square(const Derivatives& d) const
{
  FormSlot out{FormKind::gradient_square_of, std::vector<double>(size()), std::vector<double>(size(), 0.0)};
  for (std::size_t i = 0; i < size(); ++i) {
    const double g = d[1][i] * d[1][i];
    out.radial[i] = model_ == Model::torus ? g : fs_profile_[i] * g;
  }
  return out;
}

double Background::integrate(std::span<const double> density) const
{
  if (density.size() != size()) throw ParameterError("integrate: density not sampled on the grid");
  double s = 0;
  for (std::size_t i = 0; i < density.size(); ++i) s += quad_weights_[i] * density[i];
  return s;
}

BackgroundPtr fs_background(Model model, int n, std::size_t grid_size)
{
  return std::make_shared<const Background>(model, n, grid_size);
}

double integrate(const Background& bg, std::span<const double> density)
{
  return bg.integrate(density);
}

// ------------------------------------------------------------------ potentials

RadialPotential RadialPotential::zero(const Background& bg)
{
  return {std::vector<double>(bg.size(), 0.0), Normalization::integral_zero};
}

RadialPotential operator+(const RadialPotential& a, const RadialPotential& b)
{
  RadialPotential r{a.values, Normalization::none};
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
  return r;
}

RadialPotential operator-(const RadialPotential& a, const RadialPotential& b)
{
  RadialPotential r{a.values, Normalization::none};
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] -= b.values[i];
  return r;
}

RadialPotential operator*(double c, const RadialPotential& a)
{
  RadialPotential r{a.values, a.normalization == Normalization::sup_zero ? Normalization::none : a.normalization};
  for (double& v : r.values) v *= c;
  return r;
}

RadialPotential shifted(const RadialPotential& a, double c)
{
  RadialPotential r{a.values, Normalization::none};
  for (double& v : r.values) v += c;
  return r;
}

RadialPotential normalized_integral_zero(const Background& bg, RadialPotential a)
{
  const double mean = bg.integrate(a.values) / bg.volume();
  for (double& v : a.values) v -= mean;
  a.normalization = Normalization::integral_zero;
  return a;
}

double oscillation(const RadialPotential& a)
{
  const auto [lo, hi] = std::minmax_element(a.values.begin(), a.values.end());
  return *hi - *lo;
}

// ------------------------------------------------------------------ metrics

double MetricState::min_ricci() const
{
  double m = *std::min_element(lambda_r.begin(), lambda_r.end());
  if (bg().model() == Model::cpn && bg().n() > 1)
    m = std::min(m, *std::min_element(lambda_s.begin(), lambda_s.end()));
  return m;
}

double MetricState::einstein_deviation() const
{
  double d = 0;
  const bool transverse = bg().model() == Model::cpn && bg().n() > 1;
  for (std::size_t i = 0; i < lambda_r.size(); ++i) {
    d = std::max(d, std::abs(lambda_r[i] - 1));
    if (transverse) d = std::max(d, std::abs(lambda_s[i] - 1));
  }
  return d;
}

MetricState make_metric(BackgroundPtr bgp, RadialPotential phi)
{
  const Background& bg = *bgp;
  const std::size_t m = bg.size();
  if (phi.values.size() != m) throw ParameterError("potential not sampled on the background grid");
  for (double v : phi.values)
    if (!std::isfinite(v)) throw ParameterError("potential has non-finite values");
  const double tail = bg.basis().tail_ratio(phi.values);
  if (tail > kResolvedTail)
    throw ParameterError("potential not resolved on the grid (spectral tail " + std::to_string(tail) + ")");

  const Derivatives d = bg.basis().derivatives(phi.values, 4);
  MetricState st;
  st.background = bgp;
  st.kept_modes = d.kept_modes;
  st.moment.resize(m);
  st.profile.resize(m);
  st.density_ratio.resize(m);
  st.log_density.resize(m);
  st.omega = {FormKind::perturbed_metric, std::vector<double>(m), std::vector<double>(m)};
  st.ricci = {FormKind::ricci_of_perturbed, std::vector<double>(m), std::vector<double>(m)};
  st.lambda_r.resize(m);
  st.lambda_s.resize(m);
  const auto x = bg.nodes();

  if (bg.model() == Model::torus) {
    for (std::size_t i = 0; i < m; ++i) {
      const double s = 1 + d[2][i];
      if (!(s > 0)) throw NotKahlerError(i, x[i], s);
      const double l1 = d[3][i] / s;
      const double l2 = d[4][i] / s - l1 * l1;
      st.moment[i] = x[i];
      st.profile[i] = s;
      st.density_ratio[i] = s;
      st.log_density[i] = std::log(s);
      st.omega.radial[i] = st.omega.transverse[i] = s;
      st.ricci.radial[i] = st.ricci.transverse[i] = -l2;
      st.lambda_r[i] = st.lambda_s[i] = -l2 / s;
    }
    st.potential = std::move(phi);
    return st;
  }

  const int n = bg.n();
  const double r = bg.moment_length();
  const auto w0 = bg.fs_profile();
  const double w0pp = -2 / r;
  const double vp = -1 / r;
  for (std::size_t i = 0; i < m; ++i) {
    const double w0p = (r - 2 * x[i]) / r;
    const double v = (r - x[i]) / r;
    const double s = 1 + w0p * d[1][i] + w0[i] * d[2][i];
    const double q = 1 + v * d[1][i];
    if (!(s > 0)) throw NotKahlerError(i, x[i], s);
    if (!(q > 0)) throw NotKahlerError(i, x[i], q);
    const double s1 = w0pp * d[1][i] + 2 * w0p * d[2][i] + w0[i] * d[3][i];
    const double s2 = 3 * w0pp * d[2][i] + 3 * w0p * d[3][i] + w0[i] * d[4][i];
    const double q1 = vp * d[1][i] + v * d[2][i];
    const double q2 = 2 * vp * d[2][i] + v * d[3][i];
    // L = log rho = (n-1) log q + log s
    const double l1 = (n - 1) * q1 / q + s1 / s;
    const double l2 = (n - 1) * (q2 / q - (q1 / q) * (q1 / q)) + s2 / s - (s1 / s) * (s1 / s);
    const double hess_r = w0p * l1 + w0[i] * l2;
    const double hess_s = v * l1;

    st.moment[i] = x[i] * q;
    st.profile[i] = w0[i] * s;
    st.log_density[i] = (n - 1) * std::log(q) + std::log(s);
    st.density_ratio[i] = std::exp(st.log_density[i]);
    st.omega.radial[i] = s;
    st.omega.transverse[i] = q;
    st.ricci.radial[i] = 1 - hess_r;
    st.ricci.transverse[i] = 1 - hess_s;
    st.lambda_r[i] = st.ricci.radial[i] / s;
    st.lambda_s[i] = st.ricci.transverse[i] / q;
  }
  st.potential = std::move(phi);
  return st;
}

RicciPair ricci_eigenvalues(const MetricState& state)
{
  return {state.lambda_r, state.lambda_s};
}

std::vector<double> sigma_k(const MetricState& state, int k)
{
  const int n = state.bg().n();
  if (k < 0 || k > n) throw ParameterError("sigma_k: k out of range");
  const double a = binomial(n - 1, k);
  const double b = binomial(n - 1, k - 1);
  std::vector<double> out(state.lambda_r.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double ls = state.lambda_s[i];
    double v = a * std::pow(ls, k);
    if (k >= 1) v += b * std::pow(ls, k - 1) * state.lambda_r[i];
    out[i] = v;
  }
  return out;
}

std::vector<double> laplacian(const MetricState& state, std::span<const double> u)
{
  const Background& bg = state.bg();
  if (u.size() != bg.size()) throw ParameterError("laplacian: function not sampled on the grid");
  const FormSlot h = bg.hessian(u);
  const int n = bg.n();
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = h.radial[i] / state.omega.radial[i];
    if (n > 1) out[i] += (n - 1) * h.transverse[i] / state.omega.transverse[i];
  }
  return out;
}

RicciPotential ricci_potential(const MetricState& state)
{
  const Background& bg = state.bg();
  if (bg.model() != Model::cpn) throw UnsupportedModelError("ricci_potential needs a Fano model");
  const std::size_t m = bg.size();
  // Ric - omega_phi = -i ddbar(log rho + phi), and e^f rho = e^{-phi + c}
  std::vector<double> f(m);
  std::vector<double> e(m);
  for (std::size_t i = 0; i < m; ++i) e[i] = std::exp(-state.potential.values[i]);
  const double c = std::log(bg.volume() / bg.integrate(e));
  for (std::size_t i = 0; i < m; ++i) f[i] = -state.log_density[i] - state.potential.values[i] + c;

  const FormSlot h = bg.hessian(f);
  double defect = 0;
  for (std::size_t i = 0; i < m; ++i) {
    defect = std::max(defect, std::abs(h.radial[i] - (state.ricci.radial[i] - state.omega.radial[i])));
    if (bg.n() > 1)
      defect = std::max(defect, std::abs(h.transverse[i] - (state.ricci.transverse[i] - state.omega.transverse[i])));
  }
  return {RadialPotential{std::move(f), Normalization::none}, defect};
}

std::vector<double> wedge_density(const Background& bg, std::span<const FormSlot* const> slots)
{
  const int n = bg.n();
  if (static_cast<int>(slots.size()) != n)
    throw ParameterError("wedge_density: need exactly n = " + std::to_string(n) + " slots");
  int gradients = 0;
  for (const FormSlot* s : slots) {
    if (s->radial.size() != bg.size()) throw ParameterError("wedge_density: slot not on the grid");
    if (s->kind == FormKind::gradient_square_of) ++gradients;
  }
  if (gradients > 1) throw ParameterError("wedge_density: at most one gradient-square slot");

  std::vector<double> out(bg.size(), 0.0);
  if (n == 1) {
    out = slots[0]->radial;
    return out;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    double sum = 0;
    for (int j = 0; j < n; ++j) {
      double term = slots[static_cast<std::size_t>(j)]->radial[i];
      for (int l = 0; l < n; ++l)
        if (l != j) term *= slots[static_cast<std::size_t>(l)]->transverse[i];
      sum += term;
    }
    out[i] = sum / n;
  }
  return out;
}

std::vector<double> wedge_density(const Background& bg, std::initializer_list<const FormSlot*> slots)
{
  return wedge_density(bg, std::span<const FormSlot* const>(slots.begin(), slots.size()));
}

std::vector<const FormSlot*> repeat_slots(std::initializer_list<std::pair<const FormSlot*, int>> parts)
{
  std::vector<const FormSlot*> out;
  for (const auto& [slot, count] : parts)
    for (int i = 0; i < count; ++i) out.push_back(slot);
  return out;
}

}  // namespace kahler
