#pragma once

// Portable seeded draws. std::mt19937_64 has a fully specified output
// sequence; the standard distributions do not, so the conversions to
// uniform/normal/index draws are done here.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace reset::harness {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_zero() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1}.
  std::uint64_t index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal() {
    const double radius = std::sqrt(-2.0 * std::log(uniform_open_zero()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace reset::harness
