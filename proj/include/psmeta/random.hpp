#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>

namespace psmeta {

/// The single random source threaded through agents and environments.
/// mt19937_64 output is fully specified by the standard, so trajectories
/// are reproducible across platforms as long as we avoid the
/// implementation-defined std distributions.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

/// Uniform in [0, 1), built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform index in [0, n). n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return std::min(i, n - 1);
}

}  // namespace psmeta
