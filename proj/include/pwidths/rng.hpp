#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pwidths::rng {

// Stateless counter-based stream: every draw is a pure function of
// (key, counter), so disjoint index ranges can be sampled in any order or on
// any thread and still reproduce the same values.

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t a) noexcept {
  return mix64(key ^ mix64(a + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t a, std::uint64_t b) noexcept {
  return derive_key(derive_key(key, a), b);
}

/// Uniform in the open interval (0, 1).
inline double uniform(std::uint64_t key, std::uint64_t counter) noexcept {
  const std::uint64_t bits = derive_key(key, counter) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two consecutive uniforms.
inline double gaussian(std::uint64_t key, std::uint64_t counter) noexcept {
  const double u1 = uniform(key, 2 * counter);
  const double u2 = uniform(key, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pwidths::rng
