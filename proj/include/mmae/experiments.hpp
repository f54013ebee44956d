#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmae/bank.hpp"
#include "mmae/measurements.hpp"

namespace mmae {

enum class Stage { ModelTruth, VehicleTruth };

std::string to_string(Stage stage);
Stage stage_from_string(const std::string& name);

/// One experiment case. Q/R/P0 are stored as diagonals; JSON accepts
/// a scalar shorthand (q => q*I). The same noise config is applied to
/// all three filters of the bank.
struct ExperimentConfig {
  Stage stage = Stage::ModelTruth;
  ManeuverKind maneuver = ManeuverKind::LeftLC;

  /// Continuous-time noise intensities; filters use the discretized
  /// per-step covariance q_diag * sample_time.
  Vec4 q_diag = Vec4::Constant(0.001);
  Vec2 r_diag = Vec2::Constant(0.0025);
  Vec4 p0_diag = Vec4::Constant(1e-6);
  StateVector x0 = (StateVector() << 0.0, 10.0, 0.0, 0.0).finished();

  double lane_width = 3.5;
  double maneuver_length = 150.0;
  double sample_time = 0.01;
  double run_duration = 15.0;

  DetectionPolicy policy;
  JacobianMode jacobian_mode = JacobianMode::Simplified;

  int n_seeds = 20;
  std::uint64_t seed0 = 1;

  /// Model-truth stage only: inject the filters' per-step Q into the
  /// truth recursion so synthetic runs share the filters' statistics.
  bool truth_process_noise = true;

  // Vehicle-truth stage.
  VehicleParams vehicle;
  double vehicle_speed = 10.0;
  double steering_period = 6.0;
  /// Calibrated to one lane width of lateral offset when unset.
  std::optional<double> steering_amplitude;

  void validate() const;
};

/// Baseline of the vehicle-evaluation stage: 60 m maneuver, 6 s run.
ExperimentConfig default_vehicle_config();

struct SeedResult {
  std::uint64_t seed = 0;
  DetectionResult detection;
  /// Seconds the Straight model held argmax before detection (or end
  /// of run); the early-confusion interval during true lane changes.
  double confusion_time = 0.0;
  /// Sample variance of each model's weight over the trace, summed over
  /// models; the fluctuation statistic reported for the R sweeps.
  double weight_fluctuation = 0.0;
  std::vector<StateVector> estimates;  // combined estimate per trace row
  std::vector<Vec2> truth_xy;          // truth positions per trace row
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SeedResult> seeds;
  /// Aggregates over detected-and-correct seeds; NaN when none.
  double median_detection_time = 0.0;
  double iqr_detection_time = 0.0;
  double not_detected_fraction = 0.0;
  double mean_confusion_time = 0.0;
  double mean_weight_fluctuation = 0.0;
};

/// The bank's fixed model order in every experiment.
std::vector<ManeuverKind> bank_model_order();

/// Runs one bank over an existing series under the config's filter
/// settings. Shared by run_case and the `identify` CLI path.
SeedResult run_bank_over_series(const ExperimentConfig& cfg,
                                const MeasurementSeries& series,
                                std::uint64_t seed);

/// Generates the stage-appropriate series per seed, runs the bank,
/// detects, and aggregates.
ExperimentReport run_case(const ExperimentConfig& cfg);

enum class SweepAxis { Q, R };

/// One run_case per swept scalar (Q or R isotropic diagonal), values
/// ascending.
std::vector<ExperimentReport> run_sweep(const ExperimentConfig& base,
                                        SweepAxis axis,
                                        const std::vector<double>& values);

/// run_case with stage forced to VehicleTruth (amplitude calibrated on
/// demand).
ExperimentReport run_vehicle_eval(const ExperimentConfig& cfg);

/// Default case grids mirrored from the noise-variation studies.
std::vector<double> tuning_q_grid();    // {0.001, 0.01, 0.1, 1.0}
std::vector<double> tuning_r_grid();    // {0.0025, 0.01, 0.04}
std::vector<double> vehicle_q_grid();   // {0.005, 0.01, 0.025, 0.05}
std::vector<double> vehicle_r_grid();   // {0.0025, 0.01}
std::vector<Vec4> vehicle_velocity_weighted_q();  // cases 8-9 style

enum class ReportFormat { Csv, Json };

/// Writes <prefix>_report.json (json) or <prefix>_table.csv plus
/// per-seed <prefix>_seed<k>_trace.csv (csv) under out_dir. Trace CSV
/// schema: t,w_straight,w_left,w_right,est_x,est_vx,est_y,est_vy,
/// truth_x,truth_y.
void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::string& out_dir, const std::string& prefix);

// JSON round trip for configs and reports.
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& json_text);
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string report_to_json(const ExperimentReport& report);

}  // namespace mmae
