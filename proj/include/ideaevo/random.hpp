#pragma once

#include <cstdint>
#include <random>

namespace ideaevo {

// One generator per simulation run; every stochastic step draws from it.
using Rng = std::mt19937_64;

namespace detail {

// Uniform double in [0, 1) from the top 53 bits of one draw.
template <class URBG>
double uniform01(URBG& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; bound must be > 0.
template <class URBG>
std::uint64_t uniform_below(URBG& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

template <class URBG>
bool bernoulli(URBG& rng, double prob) {
  if (prob <= 0.0) return false;
  if (prob >= 1.0) return true;
  return uniform01(rng) < prob;
}

}  // namespace detail

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace ideaevo
