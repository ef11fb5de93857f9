#pragma once

#include <cstdint>
#include <random>

#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace floorset {

// The engine is fully specified by the standard; distributions come from
// Boost.Random so draws are identical across standard-library vendors.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for task `index` of a run seeded with `seed`.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL) ^ salt));
}

inline double uniform01(Rng& rng) { return boost::random::uniform_01<double>()(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}

template <typename Int>
Int uniform_int(Rng& rng, Int lo, Int hi) {
  return boost::random::uniform_int_distribution<Int>(lo, hi)(rng);
}

}  // namespace floorset
