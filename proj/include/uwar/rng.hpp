#pragma once

#include <cstdint>
#include <random>

namespace uwar {

// Seedable deterministic generator. All variate transforms are implemented
// here rather than with std::<distribution>, whose draw sequences are
// implementation defined; a given seed therefore reproduces the same stream
// on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform on (0, 1).
  double uniform();

  /// Standard normal (Box-Muller, two uniforms per draw).
  double normal();

  /// Gamma(shape, scale 1), shape > 0 (Marsaglia-Tsang).
  double gamma(double shape);

  /// Chi-square with df > 0 (not necessarily integer).
  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

  /// Derive a decorrelated child seed for stream `stream` (splitmix64).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

}  // namespace uwar
