#include "mmae/bank.hpp"

#include <algorithm>
#include <future>
#include <numeric>

namespace mmae {

FilterBank init_bank(const std::vector<ManeuverModel>& models,
                     const StateVector& x0, const Mat4& p0,
                     const std::vector<NoiseConfig>& noise,
                     JacobianMode jacobian_mode) {
  if (models.empty()) {
    throw ConfigError("init_bank: model list is empty");
  }
  if (noise.size() != models.size()) {
    throw ConfigError("init_bank: one NoiseConfig required per model");
  }
  FilterBank bank;
  bank.x_origin = x0;
  bank.jacobian_mode = jacobian_mode;
  for (size_t j = 0; j < models.size(); ++j) {
    bank.filters.push_back({models[j], {x0, p0}, noise[j]});
  }
  bank.weights.assign(models.size(), 1.0 / static_cast<double>(models.size()));
  return bank;
}

namespace {

// Predict + update for one filter; returns the raw likelihood.
double filter_cycle(BankFilter& f, const Vec2& z, double x_origin,
                    JacobianMode mode) {
  if (f.model.kind == ManeuverKind::Straight) {
    f.belief = kf_predict(f.belief,
                          straight_transition(f.model.params.sample_time),
                          f.noise.process);
  } else {
    const Direction dir = f.model.kind == ManeuverKind::LeftLC
                              ? Direction::Left
                              : Direction::Right;
    const LaneChangeParams params = f.model.params;
    f.belief = ekf_predict(
        f.belief,
        [&](const StateVector& s) {
          return lane_change_propagate(s, params, dir, x_origin);
        },
        [&](const StateVector& s) {
          return lane_change_jacobian(s, params, dir, mode, x_origin);
        },
        f.noise.process);
  }
  auto [posterior, innovation] =
      kf_update(f.belief, z, measurement_matrix(), f.noise.measurement);
  f.belief = posterior;
  return gaussian_likelihood(innovation);
}

}  // namespace

std::vector<double> bank_step(FilterBank& bank, const Vec2& measurement,
                              ExecutionMode exec) {
  const size_t m = bank.filters.size();
  const double x_origin = bank.x_origin[idx::kX];
  std::vector<double> likelihoods(m, 0.0);

  if (exec == ExecutionMode::Parallel && m > 1) {
    std::vector<std::future<double>> futures;
    futures.reserve(m);
    for (size_t j = 0; j < m; ++j) {
      futures.push_back(std::async(std::launch::async, [&, j] {
        return filter_cycle(bank.filters[j], measurement, x_origin,
                            bank.jacobian_mode);
      }));
    }
    for (size_t j = 0; j < m; ++j) likelihoods[j] = futures[j].get();
  } else {
    for (size_t j = 0; j < m; ++j) {
      likelihoods[j] = filter_cycle(bank.filters[j], measurement, x_origin,
                                    bank.jacobian_mode);
    }
  }

  bool any_alive = false;
  for (double l : likelihoods) {
    if (std::isfinite(l) && l > 0.0) any_alive = true;
  }
  if (!any_alive) {
    throw NumericalError(
        "degenerate bank: every model likelihood vanished (model mismatch "
        "or broken noise config)");
  }

  // Weight recursion in fixed model order: multiply, floor, renormalize.
  double sum = 0.0;
  for (size_t j = 0; j < m; ++j) {
    const double l = std::max(likelihoods[j], kLikelihoodFloor);
    bank.weights[j] = std::max(bank.weights[j] * l, kWeightFloor);
    sum += bank.weights[j];
  }
  for (double& w : bank.weights) w /= sum;
  ++bank.step_count;
  return likelihoods;
}

GaussianBelief combine(const FilterBank& bank) {
  GaussianBelief out;
  for (size_t j = 0; j < bank.filters.size(); ++j) {
    out.mean += bank.weights[j] * bank.filters[j].belief.mean;
  }
  for (size_t j = 0; j < bank.filters.size(); ++j) {
    const Vec4 d = bank.filters[j].belief.mean - out.mean;
    out.cov += bank.weights[j] *
               (d * d.transpose() + bank.filters[j].belief.cov);
  }
  out.cov = symmetrize(out.cov);
  return out;
}

DetectionResult detect(const std::vector<std::vector<double>>& weight_trace,
                       const std::vector<ManeuverKind>& model_order,
                       const DetectionPolicy& policy, double sample_time) {
  if (weight_trace.empty()) {
    throw ConfigError("detect: empty weight trace");
  }
  const size_t m = model_order.size();
  DetectionResult result;
  result.weight_trace = weight_trace;

  // run_start[j]: index where the current consecutive >=threshold run
  // of model j began, or -1 when below.
  std::vector<long> run_start(m, -1);
  long prev_argmax = -1;

  for (size_t i = 0; i < weight_trace.size(); ++i) {
    const auto& w = weight_trace[i];
    const long argmax = static_cast<long>(
        std::max_element(w.begin(), w.end()) - w.begin());
    if (prev_argmax >= 0 && argmax != prev_argmax) ++result.switch_count;
    prev_argmax = argmax;

    for (size_t j = 0; j < m; ++j) {
      if (w[j] >= policy.threshold) {
        if (run_start[j] < 0) run_start[j] = static_cast<long>(i);
        const double held =
            (static_cast<double>(i) - run_start[j]) * sample_time;
        if (held >= policy.dwell &&
            (!result.detected || *result.detected != model_order[j])) {
          // A new model claims the decision; a re-claim by the current
          // holder keeps its original time.
          result.detected = model_order[j];
          result.detection_time = static_cast<double>(i) * sample_time;
        }
      } else {
        run_start[j] = -1;
      }
    }
  }
  return result;
}

}  // namespace mmae
