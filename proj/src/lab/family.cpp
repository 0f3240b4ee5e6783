#include "kahler/lab/family.hpp"

#include <cmath>
#include <numbers>

namespace kahler::lab {

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr int kMaxAttempts = 100;

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::string_view stream, std::uint64_t index)
    : key_(splitmix64(splitmix64(splitmix64(seed) ^ fnv1a(stream)) ^ index))
{}

std::uint64_t CounterRng::bits(std::uint64_t counter) const
{
  return splitmix64(key_ ^ splitmix64(counter));
}

double CounterRng::uniform(std::uint64_t counter, double lo, double hi) const
{
  const double u = static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

RadialPotential generate_member(BackgroundPtr bg, std::uint64_t seed, std::string_view stream, std::size_t index,
                                const FamilyParams& params)
{
  if (params.modes < 1) throw ParameterError("family needs at least one mode");
  if (!(params.amplitude >= 0)) throw ParameterError("family amplitude must be nonnegative");
  const double a = params.ramp && params.count > 0
                       ? params.amplitude * static_cast<double>(index + 1) / params.count
                       : params.amplitude;
  if (a == 0) return normalized_integral_zero(*bg, RadialPotential::zero(*bg));

  const CounterRng rng(seed, stream, index);
  const auto x = bg->nodes();
  const bool torus = bg->model() == Model::torus;
  const double length = bg->moment_length();
  std::uint64_t counter = 0;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    RadialPotential p{std::vector<double>(bg->size(), 0.0), Normalization::none};
    for (int m = 1; m <= params.modes; ++m) {
      const double w = torus ? 2 * std::numbers::pi * m / length : std::numbers::pi * m / length;
      const double scale = torus ? w * w : double(m * m);
      const double c = rng.uniform(counter++, -a, a) / scale;
      const double d = torus ? rng.uniform(counter++, -a, a) / scale : 0.0;
      for (std::size_t i = 0; i < p.values.size(); ++i)
        p.values[i] += c * std::cos(w * x[i]) + (torus ? d * std::sin(w * x[i]) : 0.0);
    }
    p = normalized_integral_zero(*bg, std::move(p));
    try {
      make_metric(bg, p);
      return p;
    } catch (const NotKahlerError&) {
    } catch (const ParameterError&) {
    }
  }
  throw ParameterError("family member " + std::to_string(index) + ": more than 99% of draws rejected; use a smaller amplitude");
}

std::vector<RadialPotential> generate_family(BackgroundPtr bg, std::uint64_t seed, std::string_view stream,
                                             const FamilyParams& params)
{
  std::vector<RadialPotential> out;
  out.reserve(static_cast<std::size_t>(params.count));
  for (int i = 0; i < params.count; ++i) out.push_back(generate_member(bg, seed, stream, static_cast<std::size_t>(i), params));
  return out;
}

}  // namespace kahler::lab
