#pragma once

#include <cstdint>
#include <random>

#include <boost/random/uniform_int_distribution.hpp>

#include "hbcm/combinatorics.hpp"

namespace hbcm {

using rng_type = std::mt19937_64;

/// SplitMix64 finalizer; decorrelates nearby seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the independent stream for trial `index` under `master`.
/// Depends only on (master, index), never on scheduling.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline rng_type make_rng(std::uint64_t seed) { return rng_type{seed}; }

/// Uniform integer in [0, bound). bound must be positive.
template <typename Rng>
big_count uniform_below(const big_count& bound, Rng& rng) {
  if (bound <= 0) throw std::invalid_argument("uniform_below: bound must be positive");
  if (bound <= std::numeric_limits<std::uint64_t>::max()) {
    auto b = static_cast<std::uint64_t>(bound);
    return big_count{std::uniform_int_distribution<std::uint64_t>(0, b - 1)(rng)};
  }
  boost::random::uniform_int_distribution<big_count> dist(0, bound - 1);
  return dist(rng);
}

}  // namespace hbcm
