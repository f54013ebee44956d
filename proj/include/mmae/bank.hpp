#pragma once

#include <optional>
#include <vector>

#include "mmae/kalman.hpp"
#include "mmae/motion_models.hpp"

namespace mmae {

/// One single-model filter of the bank.
struct BankFilter {
  ManeuverModel model;
  GaussianBelief belief;
  NoiseConfig noise;
};

enum class ExecutionMode { Serial, Parallel };

/// Classic MMAE bank: independent single-model filters plus a
/// probability-simplex weight vector. Filters never exchange state
/// (no IMM mixing step).
struct FilterBank {
  std::vector<BankFilter> filters;
  std::vector<double> weights;
  StateVector x_origin = StateVector::Zero();
  JacobianMode jacobian_mode = JacobianMode::Simplified;
  int step_count = 0;
};

/// Weight floor applied before renormalization so a model can recover
/// after a long mismatch streak.
inline constexpr double kWeightFloor = 1e-12;

/// Builds a bank with uniform weights 1/M, every filter at (x0, P0).
/// Throws ConfigError for an empty model list or mismatched noise list.
FilterBank init_bank(const std::vector<ManeuverModel>& models,
                     const StateVector& x0, const Mat4& p0,
                     const std::vector<NoiseConfig>& noise,
                     JacobianMode jacobian_mode = JacobianMode::Simplified);

/// One MMAE cycle: per-filter predict + update, weight recursion
/// w <- w * likelihood, floor, renormalize. Returns the raw per-model
/// likelihoods. Throws NumericalError if every likelihood degenerates.
std::vector<double> bank_step(FilterBank& bank, const Vec2& measurement,
                              ExecutionMode exec = ExecutionMode::Serial);

/// Moment-matched mixture of the per-filter posteriors:
///   mean = sum w_j mean_j
///   cov  = sum w_j [(mean_j - mean)(mean_j - mean)^T + cov_j]
GaussianBelief combine(const FilterBank& bank);

struct DetectionPolicy {
  double threshold = 0.7;  // weight a model must reach, in (1/M, 1]
  double dwell = 0.2;      // seconds the weight must stay above threshold
};

struct DetectionResult {
  std::optional<ManeuverKind> detected;
  std::optional<double> detection_time;  // seconds from run start
  std::vector<std::vector<double>> weight_trace;
  int switch_count = 0;  // argmax changes over the whole trace
};

/// Scans a weight trace (sample i taken at t = i*Ts) for instants where
/// one model's weight stays at or above the threshold for a whole dwell
/// window. The decision is the last model to claim such a hold; an early
/// claim that the bank later walks back is superseded. detection_time is
/// when the deciding model first completed its hold.
DetectionResult detect(const std::vector<std::vector<double>>& weight_trace,
                       const std::vector<ManeuverKind>& model_order,
                       const DetectionPolicy& policy, double sample_time);

}  // namespace mmae
