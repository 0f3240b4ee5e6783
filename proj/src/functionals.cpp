#include "kahler/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace kahler {

namespace {

using Part = std::pair<const FormSlot*, int>;

std::vector<double> wedge(const Background& bg, std::initializer_list<Part> parts)
{
  return wedge_density(bg, repeat_slots(parts));
}

double integral_of_product(const Background& bg, std::span<const double> a, std::span<const double> b)
{
  double s = 0;
  const auto w = bg.quad_weights();
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

void check_k(const Background& bg, int k)
{
  if (k < 0 || k > bg.n()) throw ParameterError("k must satisfy 0 <= k <= n");
}

std::vector<double> relative_values(const MetricState& ref, const MetricState& state)
{
  std::vector<double> out(state.potential.values);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= ref.potential.values[i];
  return out;
}

}  // namespace

MetricState reference_state(BackgroundPtr bg)
{
  return make_metric(bg, RadialPotential::zero(*bg));
}

double mu_k(const MetricState& ref, int k)
{
  const Background& bg = ref.bg();
  check_k(bg, k);
  const int n = bg.n();
  const auto d = k < n ? wedge(bg, {{&ref.ricci, k + 1}, {&ref.omega, n - k - 1}}) : wedge(bg, {{&ref.ricci, n}});
  return bg.integrate(d) / bg.volume();
}

double mu_k(BackgroundPtr bg, int k)
{
  return mu_k(reference_state(bg), k);
}

// ------------------------------------------------------------------ E_k along a path

namespace {

// Integrand of the defining path integral at parameter s.
double path_integrand(const MetricState& ref, const RadialPotential& phi, int k, PathKind kind, double mu, double s)
{
  const Background& bg = ref.bg();
  const int n = bg.n();
  const double scale = kind == PathKind::linear ? s : s * s;
  const double rate = kind == PathKind::linear ? 1.0 : 2 * s;

  RadialPotential p = ref.potential;
  for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] += scale * phi.values[i];
  MetricState st;
  try {
    st = make_metric(ref.background, std::move(p));
  } catch (const NotKahlerError& e) {
    throw PathBrokenError(s, e.what());
  }

  std::vector<double> dot(phi.values);
  for (double& v : dot) v *= rate;
  const auto lap = laplacian(st, dot);
  double value = (k + 1) * integral_of_product(bg, lap, wedge(bg, {{&st.ricci, k}, {&st.omega, n - k}}));
  if (k < n) {
    auto d = wedge(bg, {{&st.ricci, k + 1}, {&st.omega, n - k - 1}});
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= mu * st.density_ratio[i];
    value -= (n - k) * integral_of_product(bg, dot, d);
  }
  return value / bg.volume();
}

}  // namespace

EnergyValue e_k_path(const MetricState& ref, const RadialPotential& phi, int k, PathKind kind)
{
  const Background& bg = ref.bg();
  check_k(bg, k);
  if (phi.values.size() != bg.size()) throw ParameterError("potential not sampled on the background grid");
  const double mu = mu_k(ref, k);

  // composite Simpson with step halving; samples are reused across levels
  constexpr int kMaxIntervals = 4096;
  int m = 4;
  std::vector<double> f(m + 1);
  for (int i = 0; i <= m; ++i) f[i] = path_integrand(ref, phi, k, kind, mu, double(i) / m);
  auto simpson = [&](const std::vector<double>& g) {
    const int intervals = static_cast<int>(g.size()) - 1;
    double s = g.front() + g.back();
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4 : 2) * g[i];
    return s / (3.0 * intervals);
  };
  double previous = simpson(f);
  for (;;) {
    std::vector<double> g(2 * m + 1);
    for (int i = 0; i <= m; ++i) g[2 * i] = f[i];
    for (int i = 0; i < m; ++i) g[2 * i + 1] = path_integrand(ref, phi, k, kind, mu, (i + 0.5) / m);
    m *= 2;
    f = std::move(g);
    const double current = simpson(f);
    const double change = std::abs(current - previous);
    const bool done = m >= 16 && change <= 1e-9 * std::abs(current) + 1e-13;
    if (done || m >= kMaxIntervals)
      return {current, k, EnergyMethod::path, m, change / 15};
    previous = current;
  }
}

EnergyValue e_k_path(BackgroundPtr bg, const RadialPotential& phi, int k, PathKind kind)
{
  return e_k_path(reference_state(bg), phi, k, kind);
}

// ------------------------------------------------------------------ closed form

double e_k_closed(const MetricState& ref, const MetricState& st, int k)
{
  const Background& bg = ref.bg();
  check_k(bg, k);
  const int n = bg.n();
  const auto phi = relative_values(ref, st);
  std::vector<double> minus_log(bg.size());
  for (std::size_t i = 0; i < minus_log.size(); ++i) minus_log[i] = ref.log_density[i] - st.log_density[i];

  double a = 0;
  for (int j = 0; j <= n - k - 1; ++j)
    a += integral_of_product(bg, phi, wedge(bg, {{&st.omega, j}, {&ref.ricci, k + 1}, {&ref.omega, n - j - k - 1}}));
  for (int j = 0; j <= k; ++j)
    a += integral_of_product(bg, minus_log, wedge(bg, {{&st.ricci, j}, {&st.omega, n - k}, {&ref.ricci, k - j}}));

  double b = 0;
  for (int i = 0; i <= n; ++i)
    b += integral_of_product(bg, phi, wedge(bg, {{&st.omega, i}, {&ref.omega, n - i}}));

  const double v = bg.volume();
  return -a / v + (n - k) * mu_k(ref, k) * b / ((n + 1) * v);
}

EnergyValue e_k_closed(const MetricState& ref, const RadialPotential& phi, int k)
{
  check_k(ref.bg(), k);
  const MetricState st = make_metric(ref.background, ref.potential + phi);
  return {e_k_closed(ref, st, k), k, EnergyMethod::closed_form, 0, 0};
}

EnergyValue e_k_closed(BackgroundPtr bg, const RadialPotential& phi, int k)
{
  return e_k_closed(reference_state(bg), phi, k);
}

// ------------------------------------------------------------------ I and J

AubinYau i_j(const MetricState& ref, const MetricState& st)
{
  const Background& bg = ref.bg();
  const int n = bg.n();
  const auto phi = relative_values(ref, st);
  const FormSlot grad = bg.gradient_square(phi);
  AubinYau out;
  for (int i = 0; i <= n - 1; ++i) {
    const double g = bg.integrate(wedge(bg, {{&grad, 1}, {&ref.omega, i}, {&st.omega, n - 1 - i}}));
    out.i += g;
    out.j += g * (i + 1) / (n + 1);
    out.i_minus_j += g * (n - i) / (n + 1);
  }
  const double v = bg.volume();
  out.i /= v;
  out.j /= v;
  out.i_minus_j /= v;
  return out;
}

AubinYau i_j(const MetricState& ref, const RadialPotential& phi)
{
  return i_j(ref, make_metric(ref.background, ref.potential + phi));
}

AubinYau i_j(BackgroundPtr bg, const RadialPotential& phi)
{
  return i_j(reference_state(bg), phi);
}

// ------------------------------------------------------------------ critical points

std::vector<double> critical_residual(const MetricState& st, int k)
{
  const Background& bg = st.bg();
  check_k(bg, k);
  const int n = bg.n();
  const auto sk = sigma_k(st, k);
  const auto lap = laplacian(st, sk);
  const std::vector<double> next = k < n ? sigma_k(st, k + 1) : std::vector<double>(bg.size(), 0.0);
  const double c = binomial(n, k + 1) * mu_k(st, k);
  std::vector<double> out(bg.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = next[i] - lap[i] - c;
  return out;
}

// ------------------------------------------------------------------ holomorphic invariants

std::vector<double> radial_field_potential(const MetricState& st)
{
  if (st.bg().model() != Model::cpn) throw UnsupportedModelError("no radial holomorphic field on this model");
  return st.moment;
}

RadialPotential orbit_pullback(const MetricState& st, double s)
{
  const Background& bg = st.bg();
  if (bg.model() != Model::cpn) throw UnsupportedModelError("no radial holomorphic field on this model");
  const double r = bg.moment_length();
  const double es = std::exp(s);
  const auto x = bg.nodes();
  RadialPotential out{std::vector<double>(bg.size()), Normalization::none};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double moved = std::clamp(r * x[i] * es / (r - x[i] + x[i] * es), 0.0, r);
    out.values[i] = r * std::log1p(x[i] * std::expm1(s) / r) + bg.basis().interpolate(st.potential.values, moved);
  }
  return out;
}

FutakiValue futaki_k(std::span<const MetricState> probes, int k)
{
  if (probes.empty()) throw ParameterError("futaki_k needs probe metrics");
  FutakiValue out;
  out.k = k;
  for (const MetricState& st : probes) {
    const Background& bg = st.bg();
    check_k(bg, k);
    const int n = bg.n();
    const auto h = radial_field_potential(st);
    const auto lap = laplacian(st, h);
    double v = (n - k) * integral_of_product(bg, h, st.density_ratio);
    v += (k + 1) * integral_of_product(bg, lap, wedge(bg, {{&st.ricci, k}, {&st.omega, n - k}}));
    if (k < n) v -= (n - k) * integral_of_product(bg, h, wedge(bg, {{&st.ricci, k + 1}, {&st.omega, n - k - 1}}));
    out.per_probe.push_back(v);
  }
  double sum = 0;
  for (double v : out.per_probe) sum += v;
  out.value = sum / static_cast<double>(out.per_probe.size());
  for (double v : out.per_probe) out.spread = std::max(out.spread, std::abs(v - out.value));
  return out;
}

// ------------------------------------------------------------------ flat torus

double e1_cy(BackgroundPtr bg, const RadialPotential& phi)
{
  if (bg->model() != Model::torus) throw UnsupportedModelError("e1_cy needs the torus model");
  const MetricState st = make_metric(bg, phi);
  const FormSlot g = bg->gradient_square(st.log_density);
  return bg->integrate(g.radial) / bg->volume();
}

}  // namespace kahler
