#pragma once

#include <cstdint>
#include <random>

#include "hortimap/types.hpp"

namespace hortimap {

using Rng = std::mt19937_64;

// splitmix64: cheap stateless mixer, used to derive independent stream seeds
// and per-instance jitter without touching any generator state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return splitmix64(base ^ splitmix64(salt));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t s1, std::uint64_t s2) {
  return derive_seed(derive_seed(base, s1), s2);
}

inline Scalar uniform(Rng& rng, Scalar lo, Scalar hi) {
  return std::uniform_real_distribution<Scalar>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive bounds
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Deterministic per-instance value in [-1, 1], independent of any RNG stream.
inline Scalar instance_jitter(std::int64_t instance_id) {
  const std::uint64_t h = splitmix64(static_cast<std::uint64_t>(instance_id) + 0x51ed270b);
  return 2.0 * (static_cast<Scalar>(h >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace hortimap
