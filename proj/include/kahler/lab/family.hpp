#pragma once

#include "kahler/geometry.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace kahler::lab {

/// Stateless generator: every draw is a pure function of (seed, stream, index, counter).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream, std::uint64_t index);
  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on [lo, hi) with 53 random bits.
  double uniform(std::uint64_t counter, double lo, double hi) const;

 private:
  std::uint64_t key_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct FamilyParams {
  int modes = 4;
  double amplitude = 0.05;
  int count = 10;
  /// When set, member i uses amplitude * (i + 1) / count.
  bool ramp = false;
};

/// Seeded Kahler potentials with integral zero. On CP^n a member is a cosine
/// series in the moment coordinate with coefficients in [-a, a] / m^2; on the
/// torus a Fourier series with coefficients in [-a, a] / (2 pi m)^2. Draws are
/// repeated until the metric is positive and resolved on the grid.
std::vector<RadialPotential> generate_family(BackgroundPtr bg, std::uint64_t seed, std::string_view stream,
                                             const FamilyParams& params);
RadialPotential generate_member(BackgroundPtr bg, std::uint64_t seed, std::string_view stream, std::size_t index,
                                const FamilyParams& params);

}  // namespace kahler::lab
