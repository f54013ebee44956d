#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "mmae/bank.hpp"
#include "mmae/measurements.hpp"

using namespace mmae;

namespace {

const LaneChangeParams kParams{3.5, 150.0, 0.01};

std::vector<ManeuverModel> three_models() {
  return {{ManeuverKind::Straight, kParams},
          {ManeuverKind::LeftLC, kParams},
          {ManeuverKind::RightLC, kParams}};
}

NoiseConfig default_noise() {
  return {0.001 * Mat4::Identity(), 0.0025 * Mat2::Identity()};
}

StateVector x0() { return (StateVector() << 0, 10, 0, 0).finished(); }

}  // namespace

TEST_CASE("init_bank starts uniform") {
  auto bank = init_bank(three_models(), x0(), 1e-6 * Mat4::Identity(),
                        std::vector<NoiseConfig>(3, default_noise()));
  CHECK(bank.weights.size() == 3);
  for (double w : bank.weights) CHECK(w == doctest::Approx(1.0 / 3.0));
  CHECK((bank.x_origin - x0()).norm() == 0.0);

  auto single = init_bank({{ManeuverKind::Straight, kParams}}, x0(),
                          1e-6 * Mat4::Identity(), {default_noise()});
  CHECK(single.weights[0] == 1.0);
}

TEST_CASE("init_bank rejects bad configurations") {
  CHECK_THROWS_AS(init_bank({}, x0(), Mat4::Identity(), {}), ConfigError);
  CHECK_THROWS_AS(
      init_bank(three_models(), x0(), Mat4::Identity(), {default_noise()}),
      ConfigError);
}

TEST_CASE("identical filters keep uniform weights") {
  // Two copies of the same model produce identical likelihoods; the
  // normalization cancels the common factor.
  std::vector<ManeuverModel> models(2, {ManeuverKind::Straight, kParams});
  auto bank = init_bank(models, x0(), 1e-2 * Mat4::Identity(),
                        std::vector<NoiseConfig>(2, default_noise()));
  bank_step(bank, Vec2(0.11, 0.01));
  CHECK(bank.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bank.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("weights equal normalized likelihoods from a uniform prior") {
  // Same model, different R: the two likelihoods differ and the weight
  // update must reproduce their normalized ratio.
  std::vector<ManeuverModel> models(2, {ManeuverKind::Straight, kParams});
  std::vector<NoiseConfig> noise(2, default_noise());
  noise[1].measurement = 0.25 * Mat2::Identity();
  auto bank = init_bank(models, x0(), 1e-2 * Mat4::Identity(), noise);
  const auto likelihoods = bank_step(bank, Vec2(0.3, 0.2));
  const double sum = likelihoods[0] + likelihoods[1];
  CHECK(bank.weights[0] ==
        doctest::Approx(likelihoods[0] / sum).epsilon(1e-12));
  CHECK(bank.weights[1] ==
        doctest::Approx(likelihoods[1] / sum).epsilon(1e-12));
}

TEST_CASE("M=1 bank reduces to a plain Kalman filter bit-for-bit") {
  auto bank = init_bank({{ManeuverKind::Straight, kParams}}, x0(),
                        1e-6 * Mat4::Identity(), {default_noise()});
  GaussianBelief plain{x0(), 1e-6 * Mat4::Identity()};
  const Mat4 a = straight_transition(kParams.sample_time);
  std::mt19937 gen(9);
  std::normal_distribution<double> dist;
  for (int k = 0; k < 100; ++k) {
    Vec2 z(0.1 * k + 0.05 * dist(gen), 0.05 * dist(gen));
    bank_step(bank, z);
    plain = kf_predict(plain, a, default_noise().process);
    plain = kf_update(plain, z, measurement_matrix(),
                      default_noise().measurement)
                .first;
    CHECK(bank.weights[0] == 1.0);
    CHECK((bank.filters[0].belief.mean - plain.mean).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((bank.filters[0].belief.cov - plain.cov).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((combine(bank).mean - plain.mean).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("weight simplex preserved over a noisy run") {
  auto bank = init_bank(three_models(), x0(), 1e-6 * Mat4::Identity(),
                        std::vector<NoiseConfig>(3, default_noise()));
  std::mt19937 gen(2);
  std::normal_distribution<double> dist;
  for (int k = 1; k <= 500; ++k) {
    Vec2 z(0.1 * k + 0.05 * dist(gen), 0.05 * dist(gen));
    bank_step(bank, z);
    double sum = 0.0;
    for (double w : bank.weights) {
      CHECK(w >= 0.0);
      CHECK(w <= 1.0);
      sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("permuting the model list permutes weights, same combined estimate") {
  const std::vector<int> perm = {2, 0, 1};
  auto models = three_models();
  std::vector<ManeuverModel> permuted;
  for (int i : perm) permuted.push_back(models[i]);

  auto bank_a = init_bank(models, x0(), 1e-6 * Mat4::Identity(),
                          std::vector<NoiseConfig>(3, default_noise()));
  auto bank_b = init_bank(permuted, x0(), 1e-6 * Mat4::Identity(),
                          std::vector<NoiseConfig>(3, default_noise()));
  std::mt19937 gen(8);
  std::normal_distribution<double> dist;
  for (int k = 1; k <= 200; ++k) {
    Vec2 z(0.1 * k + 0.05 * dist(gen), -0.01 * k + 0.05 * dist(gen));
    bank_step(bank_a, z);
    bank_step(bank_b, z);
  }
  for (size_t j = 0; j < perm.size(); ++j) {
    CHECK(std::abs(bank_b.weights[j] - bank_a.weights[perm[j]]) <= 1e-12);
  }
  const auto ca = combine(bank_a);
  const auto cb = combine(bank_b);
  CHECK((ca.mean - cb.mean).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((ca.cov - cb.cov).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("serial and concurrent bank steps are bit-identical") {
  auto serial = init_bank(three_models(), x0(), 1e-6 * Mat4::Identity(),
                          std::vector<NoiseConfig>(3, default_noise()));
  auto parallel = serial;
  std::mt19937 gen(4);
  std::normal_distribution<double> dist;
  for (int k = 1; k <= 100; ++k) {
    Vec2 z(0.1 * k + 0.05 * dist(gen), 0.05 * dist(gen));
    bank_step(serial, z, ExecutionMode::Serial);
    bank_step(parallel, z, ExecutionMode::Parallel);
    for (size_t j = 0; j < serial.weights.size(); ++j) {
      CHECK(serial.weights[j] == parallel.weights[j]);
      CHECK((serial.filters[j].belief.mean - parallel.filters[j].belief.mean)
                .cwiseAbs()
                .maxCoeff() == 0.0);
      CHECK((serial.filters[j].belief.cov - parallel.filters[j].belief.cov)
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("combine degenerate cases") {
  auto bank = init_bank(three_models(), x0(), 1e-3 * Mat4::Identity(),
                        std::vector<NoiseConfig>(3, default_noise()));
  // All filters share (mean, cov): combined equals it, zero spread.
  auto combined = combine(bank);
  CHECK((combined.mean - x0()).norm() == 0.0);
  CHECK((combined.cov - 1e-3 * Mat4::Identity()).cwiseAbs().maxCoeff() <=
        1e-18);

  // Degenerate weights pick out one filter exactly.
  bank.weights = {1.0, 0.0, 0.0};
  bank.filters[0].belief.mean << 4, 3, 2, 1;
  combined = combine(bank);
  CHECK((combined.mean - bank.filters[0].belief.mean).norm() == 0.0);
}

TEST_CASE("combine spread term from separated means") {
  std::vector<ManeuverModel> models(2, {ManeuverKind::Straight, kParams});
  auto bank = init_bank(models, StateVector::Zero(), Mat4::Zero(),
                        std::vector<NoiseConfig>(2, default_noise()));
  bank.filters[1].belief.mean << 1, 0, 0, 0;
  const auto combined = combine(bank);
  CHECK(combined.mean[idx::kX] == doctest::Approx(0.5));
  CHECK(combined.cov(idx::kX, idx::kX) == doctest::Approx(0.25));
}

TEST_CASE("combined covariance dominates the weighted covariance sum") {
  auto bank = init_bank(three_models(), x0(), 1e-3 * Mat4::Identity(),
                        std::vector<NoiseConfig>(3, default_noise()));
  std::mt19937 gen(6);
  std::normal_distribution<double> dist;
  for (int k = 1; k <= 50; ++k) {
    bank_step(bank, Vec2(0.1 * k + 0.05 * dist(gen), 0.05 * dist(gen)));
  }
  Mat4 weighted_sum = Mat4::Zero();
  for (size_t j = 0; j < bank.filters.size(); ++j) {
    weighted_sum += bank.weights[j] * bank.filters[j].belief.cov;
  }
  const Mat4 spread = combine(bank).cov - weighted_sum;
  Eigen::SelfAdjointEigenSolver<Mat4> es(spread, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("right-model truth drives the right weight toward one") {
  // Noise-free truth from the Right model, matched initialization.
  const ManeuverModel truth_model{ManeuverKind::RightLC, kParams};
  NoiseSpec spec;  // zero noise
  const auto series = generate_from_model(truth_model, x0(), 1500, spec, 1);

  auto bank = init_bank(three_models(), x0(), 1e-6 * Mat4::Identity(),
                        std::vector<NoiseConfig>(3, default_noise()));
  std::vector<double> right_weights;
  for (const auto& sample : series.samples) {
    bank_step(bank, Vec2(sample.zx, sample.zy));
    right_weights.push_back(bank.weights[2]);
  }
  // Non-strict monotonicity over the final 80% of the run.
  const size_t start = right_weights.size() / 5;
  for (size_t i = start + 1; i < right_weights.size(); ++i) {
    CHECK(right_weights[i] >= right_weights[i - 1] - 1e-12);
  }
  CHECK(right_weights.back() > 0.99);
}

TEST_CASE("detect: constant winning trace fires after the dwell window") {
  std::vector<std::vector<double>> trace(101, {1.0, 0.0, 0.0});
  DetectionPolicy policy{0.9, 0.3};
  const auto result = detect(trace, {ManeuverKind::Straight,
                                     ManeuverKind::LeftLC,
                                     ManeuverKind::RightLC},
                             policy, 0.01);
  REQUIRE(result.detected.has_value());
  CHECK(*result.detected == ManeuverKind::Straight);
  CHECK(*result.detection_time == doctest::Approx(0.3));
  CHECK(result.switch_count == 0);
}

TEST_CASE("detect: oscillation below threshold never fires") {
  std::vector<std::vector<double>> trace;
  for (int i = 0; i < 500; ++i) {
    if (i % 2 == 0) {
      trace.push_back({0.1, 0.6, 0.3});
    } else {
      trace.push_back({0.1, 0.3, 0.6});
    }
  }
  const auto result = detect(trace, {ManeuverKind::Straight,
                                     ManeuverKind::LeftLC,
                                     ManeuverKind::RightLC},
                             DetectionPolicy{0.9, 0.3}, 0.01);
  CHECK(!result.detected.has_value());
  CHECK(result.switch_count == 499);
}

TEST_CASE("detect: crossing at 1.0 s with 0.3 s dwell fires at 1.3 s") {
  std::vector<std::vector<double>> trace;
  const double ts = 0.01;
  for (int i = 0; i <= 200; ++i) {
    const double w = i * ts >= 1.0 ? 0.95 : 0.5;
    trace.push_back({w, 1.0 - w});
  }
  const auto result =
      detect(trace, {ManeuverKind::Straight, ManeuverKind::LeftLC},
             DetectionPolicy{0.9, 0.3}, ts);
  REQUIRE(result.detected.has_value());
  CHECK(*result.detection_time == doctest::Approx(1.3));
}

TEST_CASE("detect: a later sustained hold supersedes an early false claim") {
  // Left holds 0.0-1.0 s, then straight takes over for the rest of the run.
  std::vector<std::vector<double>> trace;
  const double ts = 0.01;
  for (int i = 0; i <= 500; ++i) {
    const bool early = i * ts < 1.0;
    trace.push_back(early ? std::vector<double>{0.05, 0.95, 0.0}
                          : std::vector<double>{0.95, 0.05, 0.0});
  }
  const auto result =
      detect(trace, {ManeuverKind::Straight, ManeuverKind::LeftLC,
                     ManeuverKind::RightLC},
             DetectionPolicy{0.9, 0.3}, ts);
  REQUIRE(result.detected.has_value());
  CHECK(*result.detected == ManeuverKind::Straight);
  CHECK(*result.detection_time == doctest::Approx(1.3));
  CHECK(result.switch_count == 1);
}

TEST_CASE("detect: a re-claim by the same model keeps its first time") {
  // Straight holds, dips below threshold briefly, then holds again.
  std::vector<std::vector<double>> trace;
  const double ts = 0.01;
  for (int i = 0; i <= 300; ++i) {
    const double t = i * ts;
    const double w = (t >= 1.0 && t < 1.1) ? 0.6 : 0.95;
    trace.push_back({w, 1.0 - w, 0.0});
  }
  const auto result =
      detect(trace, {ManeuverKind::Straight, ManeuverKind::LeftLC,
                     ManeuverKind::RightLC},
             DetectionPolicy{0.9, 0.3}, ts);
  REQUIRE(result.detected.has_value());
  CHECK(*result.detected == ManeuverKind::Straight);
  CHECK(*result.detection_time == doctest::Approx(0.3));
}

TEST_CASE("detect rejects an empty trace") {
  CHECK_THROWS_AS(detect({}, {}, DetectionPolicy{}, 0.01), ConfigError);
}
