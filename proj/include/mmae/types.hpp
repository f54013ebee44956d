#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mmae {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat24 = Eigen::Matrix<double, 2, 4>;

/// 4-state kinematic estimate (x, vx, y, vy) in the road frame.
using StateVector = Vec4;

namespace idx {
inline constexpr int kX = 0;
inline constexpr int kVx = 1;
inline constexpr int kY = 2;
inline constexpr int kVy = 3;
}  // namespace idx

// Error categories mapped to CLI exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gaussian state belief: mean plus 4x4 covariance.
struct GaussianBelief {
  StateVector mean = StateVector::Zero();
  Mat4 cov = Mat4::Zero();
};

/// Measurement residual and its covariance.
struct Innovation {
  Vec2 residual = Vec2::Zero();
  Mat2 cov = Mat2::Zero();
};

/// Process and measurement noise covariances for one filter.
struct NoiseConfig {
  Mat4 process = Mat4::Zero();
  Mat2 measurement = Mat2::Zero();
};

}  // namespace mmae
