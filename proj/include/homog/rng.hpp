#pragma once

#include <cmath>
#include <cstdint>

namespace homog {

// Counter-based draws: every variate is a pure function of
// (master seed, sample index, cell index, stream), so Monte Carlo output
// cannot depend on evaluation order or thread schedule.
namespace rng {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t sample,
                         std::uint64_t cell, std::uint64_t stream) {
  std::uint64_t h = mix(seed + kGamma);
  h = mix(h ^ (sample + kGamma));
  h = mix(h ^ (cell + kGamma));
  h = mix(h ^ (stream + kGamma));
  return h;
}

// Uniform on (0,1]: never 0, so it is safe under log().
inline double uniform01(std::uint64_t seed, std::uint64_t sample,
                        std::uint64_t cell, std::uint64_t stream) {
  return (double)((key(seed, sample, cell, stream) >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller; streams 2s and 2s+1 feed one draw.
inline double normal(std::uint64_t seed, std::uint64_t sample,
                     std::uint64_t cell, std::uint64_t stream) {
  double u1 = uniform01(seed, sample, cell, 2 * stream);
  double u2 = uniform01(seed, sample, cell, 2 * stream + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace rng
}  // namespace homog
