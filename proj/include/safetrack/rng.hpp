#pragma once

#include <safetrack/types.hpp>

#include <cmath>
#include <cstdint>

namespace safetrack {

// Counter-based random numbers: every draw is a pure function of
// (key, counter words), so streams indexed by (run, agent, tick, channel)
// are reproducible regardless of evaluation order or thread scheduling.
namespace rng {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + kGolden + (a << 6) + (a >> 2)));
}

/// Collapses a word sequence into one key.
inline std::uint64_t key(std::uint64_t seed) { return splitmix64(seed); }
template <typename... Words>
std::uint64_t key(std::uint64_t seed, Words... words) {
  std::uint64_t k = splitmix64(seed);
  ((k = mix(k, static_cast<std::uint64_t>(words))), ...);
  return k;
}

/// Uniform in [0, 1).
inline double uniform(std::uint64_t k) {
  return static_cast<double>(splitmix64(k) >> 11) * 0x1.0p-53;
}

/// Uniform in [lo, hi).
inline double uniform(std::uint64_t k, double lo, double hi) {
  return lo + (hi - lo) * uniform(k);
}

/// Standard normal via Box-Muller on two derived uniforms.
inline double normal(std::uint64_t k) {
  const double u1 = 1.0 - uniform(mix(k, 1));  // (0, 1]
  const double u2 = uniform(mix(k, 2));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Vector of independent standard normals, channels indexed from 0.
inline Vector normal_vector(std::uint64_t k, Index n) {
  Vector z(n);
  for (Index c = 0; c < n; ++c) z[c] = normal(mix(k, static_cast<std::uint64_t>(c)));
  return z;
}

/// Uniformly distributed unit vector.
inline Vector unit_vector(std::uint64_t k, Index n) {
  Vector z = normal_vector(k, n);
  const double norm = z.norm();
  if (norm < 1e-12) {
    z.setZero();
    z[0] = 1.0;
    return z;
  }
  return z / norm;
}

}  // namespace rng
}  // namespace safetrack
