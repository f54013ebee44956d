#include "mmae/rng.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace mmae {

std::uint64_t CounterRng::next_u64() {
  // splitmix64 finalizer over seed + golden-ratio-striped counter.
  std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::next_uniform() {
  // 53-bit mantissa mapped to (0, 1].
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

namespace {

template <typename Mat>
Mat psd_sqrt(const Mat& cov) {
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  auto vals = es.eigenvalues();
  for (int i = 0; i < vals.size(); ++i) vals[i] = std::sqrt(std::max(vals[i], 0.0));
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Vec2 CounterRng::next_gaussian2(const Mat2& cov) {
  Vec2 z;
  z << next_gaussian(), next_gaussian();
  if (cov.isZero(0.0)) return Vec2::Zero();
  return psd_sqrt(cov) * z;
}

Vec4 CounterRng::next_gaussian4(const Mat4& cov) {
  Vec4 z;
  z << next_gaussian(), next_gaussian(), next_gaussian(), next_gaussian();
  if (cov.isZero(0.0)) return Vec4::Zero();
  return psd_sqrt(cov) * z;
}

}  // namespace mmae
