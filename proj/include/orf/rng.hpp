#pragma once

// Seeded random streams for reproducible experiments.
//
// Every random draw in the library comes from an `Rng` constructed from an
// explicit 64-bit seed. Consumers that need several independent streams derive
// child seeds from one root with `derive_seed(root, index)`:
//
//   child = splitmix64(root ^ splitmix64(index + 0x9E3779B97F4A7C15))
//
// Nested derivation (`derive_seed(derive_seed(root, a), b)`) gives a tree of
// streams, so a whole experiment is reproducible from a single integer and
// each trial or block can be computed independently of the others.
//
// Gaussian variates use the Marsaglia polar method on top of std::mt19937_64
// with our own 53-bit uniform conversion, so the streams do not depend on the
// standard library's distribution implementations.

#include <cmath>
#include <cstdint>
#include <random>

namespace orf {

using Seed = std::uint64_t;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed number `index` of `root`.
constexpr Seed derive_seed(Seed root, std::uint64_t index) noexcept {
  return splitmix64(root ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

class Rng {
 public:
  explicit Rng(Seed seed) : engine_(splitmix64(seed)) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  std::uint64_t bits() { return engine_(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection keeps the result unbiased.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  /// +1 or -1 with equal probability.
  double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace orf
