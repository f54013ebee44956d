#pragma once

#include <cstdint>

#include "mmae/types.hpp"

namespace mmae {

/// Algorithm identifier written into series metadata so outputs stay
/// reproducible across toolchains and reimplementations.
inline constexpr const char* kRngAlgorithm = "splitmix64-boxmuller-v1";

/// Counter-based generator: output i is a pure function of (seed, i),
/// so streams are reproducible and freely splittable. Gaussians come
/// from Box-Muller over the raw uniforms (std::normal_distribution is
/// implementation-defined and would break byte-exact reproducibility).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in (0, 1].
  double next_uniform();

  /// Standard normal variate.
  double next_gaussian();

  /// Sample from N(0, cov) via the symmetric matrix square root (cov
  /// may be singular PSD).
  Vec2 next_gaussian2(const Mat2& cov);
  Vec4 next_gaussian4(const Mat4& cov);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mmae
