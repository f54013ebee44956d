#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "mmae/experiments.hpp"

using namespace mmae;

namespace {

// Small fast config for unit-level checks; the full-scale runs live in
// the acceptance suite.
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.maneuver = ManeuverKind::LeftLC;
  cfg.n_seeds = 3;
  cfg.run_duration = 3.0;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config JSON round trip preserves the hash") {
  ExperimentConfig cfg = small_config();
  cfg.q_diag << 0.001, 0.05, 0.001, 0.05;
  cfg.policy.threshold = 0.85;
  const std::string text = config_to_json(cfg);
  const ExperimentConfig back = config_from_json(text);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(back.q_diag[1] == 0.05);
  CHECK(back.policy.threshold == 0.85);
}

TEST_CASE("config accepts scalar shorthand for noise fields") {
  const auto cfg = config_from_json(R"({"q": 0.01, "r": 0.04, "p0": 100})");
  CHECK(cfg.q_diag.isApproxToConstant(0.01));
  CHECK(cfg.r_diag.isApproxToConstant(0.04));
  CHECK(cfg.p0_diag.isApproxToConstant(100.0));
}

TEST_CASE("config errors carry the offending field") {
  CHECK_THROWS_WITH_AS(config_from_json(R"({"q": [1, 2]})"),
                       doctest::Contains("'q'"), ConfigError);
  CHECK_THROWS_AS(config_from_json("not json"), ConfigError);
  ExperimentConfig cfg = small_config();
  cfg.n_seeds = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.policy.threshold = 0.2;  // below 1/M
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("vehicle stage config defaults to the 60 m maneuver") {
  const auto cfg = config_from_json(R"({"stage": "vehicle"})");
  CHECK(cfg.maneuver_length == 60.0);
  CHECK(cfg.steering_period == 6.0);
  CHECK(cfg.run_duration == 6.0);
  CHECK(cfg.truth_process_noise);
}

TEST_CASE("single-value sweep reproduces run_case exactly") {
  ExperimentConfig base = small_config();
  const auto direct = run_case(base);
  const auto swept = run_sweep(base, SweepAxis::Q, {base.q_diag[0]});
  REQUIRE(swept.size() == 1);
  CHECK(report_to_json(swept[0]) == report_to_json(direct));
}

TEST_CASE("sweep input validation") {
  CHECK_THROWS_AS(run_sweep(small_config(), SweepAxis::Q, {}), ConfigError);
  CHECK_THROWS_AS(run_sweep(small_config(), SweepAxis::Q, {0.1, 0.01}),
                  ConfigError);
  CHECK_THROWS_AS(run_vehicle_eval(small_config()), ConfigError);
}

TEST_CASE("single-seed report has zero IQR") {
  ExperimentConfig cfg = small_config();
  cfg.n_seeds = 1;
  const auto report = run_case(cfg);
  REQUIRE(report.seeds.size() == 1);
  if (report.not_detected_fraction == 0.0) {
    CHECK(report.iqr_detection_time == 0.0);
  }
}

TEST_CASE("emitted trace CSV has run_duration/Ts + 1 rows per seed") {
  ExperimentConfig cfg = small_config();
  cfg.n_seeds = 2;
  const auto report = run_case(cfg);
  const auto dir =
      (std::filesystem::temp_directory_path() / "mmae_exp_test").string();
  emit_report(report, ReportFormat::Csv, dir, "unit");

  const std::string trace = slurp(dir + "/unit_seed1_trace.csv");
  const long rows = std::count(trace.begin(), trace.end(), '\n');
  const long expected =
      static_cast<long>(cfg.run_duration / cfg.sample_time) + 1;
  CHECK(rows == expected + 1);  // + header
  std::filesystem::remove_all(dir);
}

TEST_CASE("report emission is byte-deterministic") {
  ExperimentConfig cfg = small_config();
  cfg.n_seeds = 2;
  const auto dir_a =
      (std::filesystem::temp_directory_path() / "mmae_det_a").string();
  const auto dir_b =
      (std::filesystem::temp_directory_path() / "mmae_det_b").string();
  const auto report_a = run_case(cfg);
  const auto report_b = run_case(cfg);
  emit_report(report_a, ReportFormat::Json, dir_a, "case");
  emit_report(report_b, ReportFormat::Json, dir_b, "case");
  emit_report(report_a, ReportFormat::Csv, dir_a, "case");
  emit_report(report_b, ReportFormat::Csv, dir_b, "case");
  CHECK(slurp(dir_a + "/case_report.json") ==
        slurp(dir_b + "/case_report.json"));
  CHECK(slurp(dir_a + "/case_table.csv") == slurp(dir_b + "/case_table.csv"));
  CHECK(slurp(dir_a + "/case_seed1_trace.csv") ==
        slurp(dir_b + "/case_seed1_trace.csv"));
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("report JSON echoes every result-affecting knob") {
  ExperimentConfig cfg = small_config();
  cfg.jacobian_mode = JacobianMode::ExactAnalytic;
  const auto report = run_case(cfg);
  const std::string text = report_to_json(report);
  for (const char* key :
       {"\"q\"", "\"r\"", "\"p0\"", "\"x0\"", "\"threshold\"", "\"dwell\"",
        "\"jacobian_mode\"", "\"exact\"", "\"sample_time\"", "\"lane_width\"",
        "\"maneuver_length\"", "\"seed0\"", "\"config_hash\""}) {
    CHECK_MESSAGE(text.find(key) != std::string::npos, key);
  }
}

TEST_CASE("identify path: run_bank_over_series on a generated series") {
  ExperimentConfig cfg = small_config();
  NoiseSpec spec;
  spec.measurement_cov = cfg.r_diag.asDiagonal();
  spec.process_cov = Mat4(cfg.q_diag.asDiagonal());
  const ManeuverModel truth{ManeuverKind::LeftLC,
                            {cfg.lane_width, cfg.maneuver_length,
                             cfg.sample_time}};
  const auto series = generate_from_model(truth, cfg.x0, 300, spec, 42);
  const auto result = run_bank_over_series(cfg, series, 42);
  CHECK(result.detection.weight_trace.size() == 301);
  CHECK(result.estimates.size() == 301);
}
