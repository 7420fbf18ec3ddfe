#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "udn/errors.hpp"

namespace udn {

/// SplitMix64 finalizer. Used everywhere a derived seed is needed so that
/// arithmetically related seeds (0, 1, 2, ...) produce decorrelated streams.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic random source. The engine is std::mt19937_64 (bit-exact
/// across platforms) and every distribution below is a fixed hand-written
/// transform of its output, so identical seeds give identical draws on any
/// conforming standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw invalid_parameter("uniform_index: n must be positive");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  /// Exponential with mean 1 (inverse CDF).
  double exponential() { return -std::log1p(-uniform()); }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Poisson draw, exact for any mean. Large means are decomposed into
  /// independent chunks (Poisson additivity) so Knuth's product never
  /// underflows.
  std::uint64_t poisson(double mean) {
    if (mean < 0.0) throw invalid_parameter("poisson: mean must be >= 0");
    std::uint64_t total = 0;
    while (mean > 32.0) {
      total += poisson_knuth(32.0);
      mean -= 32.0;
    }
    return total + poisson_knuth(mean);
  }

 private:
  std::uint64_t poisson_knuth(double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double product = uniform();
    while (product > limit) {
      ++k;
      product *= uniform();
    }
    return k;
  }

  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a parent seed and a stream tag.
/// Asymmetric in its arguments: the parent is finalized before the tag is
/// folded in.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(mix64(seed) ^ (tag + 0x9e3779b97f4a7c15ull));
}

}  // namespace udn
