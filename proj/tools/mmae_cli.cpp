// maneuver-id command line: simulate measurement series, identify
// maneuvers from series files, and reproduce the tuning / vehicle
// evaluation experiment suites.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmae/experiments.hpp"

namespace {

using namespace mmae;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> stage;
  std::optional<std::string> maneuver;
  std::optional<double> q;
  std::optional<double> r;
  std::optional<double> p0;
  std::optional<double> lane_width;
  std::optional<double> maneuver_length;
  std::optional<double> sample_time;
  std::optional<double> run_duration;
  std::optional<double> threshold;
  std::optional<double> dwell;
  std::optional<std::string> jacobian_mode;
  std::optional<int> n_seeds;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "JSON config file (flags override its fields)");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "base RNG seed");
  cmd->add_option("--stage", o.stage, "truth source: model | vehicle");
  cmd->add_option("--maneuver", o.maneuver,
                  "true maneuver: straight | left | right");
  cmd->add_option("--q", o.q, "process noise intensity (isotropic; filters use q*Ts per step)");
  cmd->add_option("--r", o.r, "measurement noise variance (isotropic)");
  cmd->add_option("--p0", o.p0, "initial covariance (isotropic)");
  cmd->add_option("--lane-width", o.lane_width, "lane width w_L (m)");
  cmd->add_option("--maneuver-length", o.maneuver_length,
                  "lane change length L (m)");
  cmd->add_option("--sample-time", o.sample_time, "sampling time Ts (s)");
  cmd->add_option("--run-duration", o.run_duration, "run length (s)");
  cmd->add_option("--threshold", o.threshold, "detection weight threshold");
  cmd->add_option("--dwell", o.dwell, "detection dwell time (s)");
  cmd->add_option("--jacobian-mode", o.jacobian_mode,
                  "lane change Jacobian: simplified | exact");
  cmd->add_option("--n-seeds", o.n_seeds, "seeds per case");
}

ExperimentConfig resolve_config(const CommonOpts& o) {
  ExperimentConfig cfg;
  // Stage must be known before JSON parsing so stage defaults apply.
  nlohmann::json j = nlohmann::json::object();
  if (!o.config_path.empty()) {
    j = nlohmann::json::parse(read_file(o.config_path));
  }
  if (o.stage) j["stage"] = *o.stage;
  if (o.maneuver) j["maneuver"] = *o.maneuver;
  if (o.q) j["q"] = *o.q;
  if (o.r) j["r"] = *o.r;
  if (o.p0) j["p0"] = *o.p0;
  if (o.lane_width) j["lane_width"] = *o.lane_width;
  if (o.maneuver_length) j["maneuver_length"] = *o.maneuver_length;
  if (o.sample_time) j["sample_time"] = *o.sample_time;
  if (o.run_duration) j["run_duration"] = *o.run_duration;
  if (o.threshold) j["threshold"] = *o.threshold;
  if (o.dwell) j["dwell"] = *o.dwell;
  if (o.jacobian_mode) j["jacobian_mode"] = *o.jacobian_mode;
  if (o.n_seeds) j["n_seeds"] = *o.n_seeds;
  if (o.seed) j["seed0"] = *o.seed;
  return config_from_json(j.dump());
}

std::string case_prefix(const ExperimentConfig& cfg) {
  std::ostringstream name;
  name << to_string(cfg.stage) << '_' << to_string(cfg.maneuver) << "_q"
       << format_value(cfg.q_diag[0]) << "_r" << format_value(cfg.r_diag[0]);
  return name.str();
}

void emit_both(const ExperimentReport& report, const std::string& out_dir,
               const std::string& prefix) {
  emit_report(report, ReportFormat::Json, out_dir, prefix);
  emit_report(report, ReportFormat::Csv, out_dir, prefix);
}

void print_summary(const ExperimentReport& r, const std::string& label) {
  std::cout << label << ": median_detection_time="
            << format_value(r.median_detection_time)
            << " s, iqr=" << format_value(r.iqr_detection_time)
            << " s, not_detected=" << format_value(r.not_detected_fraction)
            << ", mean_confusion=" << format_value(r.mean_confusion_time)
            << " s\n";
}

int cmd_simulate(const CommonOpts& o) {
  ExperimentConfig cfg = resolve_config(o);
  cfg.validate();
  NoiseSpec spec;
  spec.measurement_cov = cfg.r_diag.asDiagonal();
  const std::uint64_t seed = o.seed.value_or(cfg.seed0);

  MeasurementSeries series;
  if (cfg.stage == Stage::ModelTruth) {
    if (cfg.truth_process_noise) {
      spec.process_cov = Mat4(cfg.q_diag.asDiagonal());
    }
    const ManeuverModel model{
        cfg.maneuver,
        {cfg.lane_width, cfg.maneuver_length, cfg.sample_time}};
    const int n_steps =
        static_cast<int>(std::round(cfg.run_duration / cfg.sample_time));
    series = generate_from_model(model, cfg.x0, n_steps, spec, seed);
  } else {
    VehicleScenario scenario;
    scenario.vehicle = cfg.vehicle;
    scenario.initial_speed = cfg.vehicle_speed;
    scenario.duration = cfg.run_duration;
    scenario.sample_time = cfg.sample_time;
    if (cfg.maneuver != ManeuverKind::Straight) {
      scenario.steering.kind = SteeringKind::SinusoidLC;
      scenario.steering.period = cfg.steering_period;
      scenario.steering.direction = cfg.maneuver == ManeuverKind::LeftLC
                                        ? Direction::Left
                                        : Direction::Right;
      scenario.steering.amplitude =
          cfg.steering_amplitude
              ? *cfg.steering_amplitude
              : calibrate_amplitude(cfg.vehicle, cfg.vehicle_speed,
                                    cfg.steering_period, cfg.lane_width,
                                    cfg.sample_time);
    }
    series = generate_from_vehicle(scenario, spec, seed);
  }

  std::filesystem::create_directories(o.out_dir);
  const auto path = std::filesystem::path(o.out_dir) /
                    (case_prefix(cfg) + "_seed" + std::to_string(seed) +
                     "_series.csv");
  write_series_csv(series, path.string(), config_to_json(cfg));
  std::cout << "wrote " << path.string() << " (" << series.samples.size()
            << " samples)\n";
  return 0;
}

int cmd_identify(const CommonOpts& o, const std::string& series_path) {
  ExperimentConfig cfg = resolve_config(o);
  const MeasurementSeries series = read_series_csv(series_path);
  if (series.samples.empty()) {
    throw ConfigError("series file has no samples: " + series_path);
  }
  cfg.sample_time = series.sample_time;
  cfg.run_duration = series.samples.back().t;
  cfg.validate();

  const SeedResult result = run_bank_over_series(cfg, series, cfg.seed0);
  ExperimentReport report;
  report.config = cfg;
  report.seeds.push_back(result);
  report.median_detection_time =
      result.detection.detection_time
          ? *result.detection.detection_time
          : std::numeric_limits<double>::quiet_NaN();
  report.iqr_detection_time = 0.0;
  report.not_detected_fraction = result.detection.detected ? 0.0 : 1.0;
  report.mean_confusion_time = result.confusion_time;
  report.mean_weight_fluctuation = result.weight_fluctuation;
  emit_both(report, o.out_dir, "identify");

  std::cout << "detected: "
            << (result.detection.detected
                    ? to_string(*result.detection.detected)
                    : "none");
  if (result.detection.detection_time) {
    std::cout << " at t=" << format_value(*result.detection.detection_time)
              << " s";
  }
  std::cout << " (switches=" << result.detection.switch_count << ")\n";
  return 0;
}

int cmd_tune_sweep(const CommonOpts& o, const std::string& axis,
                   std::vector<double> values) {
  ExperimentConfig base = resolve_config(o);
  SweepAxis sweep_axis;
  if (axis == "q") {
    sweep_axis = SweepAxis::Q;
    if (values.empty()) values = tuning_q_grid();
  } else if (axis == "r") {
    sweep_axis = SweepAxis::R;
    if (values.empty()) values = tuning_r_grid();
  } else {
    throw ConfigError("sweep axis must be q or r");
  }

  const auto reports = run_sweep(base, sweep_axis, values);
  for (size_t i = 0; i < reports.size(); ++i) {
    const std::string prefix = case_prefix(reports[i].config);
    emit_both(reports[i], o.out_dir, prefix);
    print_summary(reports[i], prefix);
  }
  return 0;
}

int cmd_vehicle_eval(const CommonOpts& o, bool full_grid) {
  ExperimentConfig base = resolve_config(o);
  if (!o.stage) base.stage = Stage::VehicleTruth;
  if (base.stage != Stage::VehicleTruth) {
    throw ConfigError("vehicle-eval requires stage=vehicle");
  }

  if (!full_grid) {
    const auto report = run_vehicle_eval(base);
    const std::string prefix = case_prefix(report.config);
    emit_both(report, o.out_dir, prefix);
    print_summary(report, prefix);
    return 0;
  }

  int case_id = 0;
  for (double q : vehicle_q_grid()) {
    for (double r : vehicle_r_grid()) {
      ExperimentConfig cfg = base;
      cfg.q_diag = Vec4::Constant(q);
      cfg.r_diag = Vec2::Constant(r);
      const auto report = run_vehicle_eval(cfg);
      const std::string prefix =
          "case" + std::to_string(++case_id) + "_" + case_prefix(cfg);
      emit_both(report, o.out_dir, prefix);
      print_summary(report, prefix);
    }
  }
  for (const Vec4& q : vehicle_velocity_weighted_q()) {
    ExperimentConfig cfg = base;
    cfg.q_diag = q;
    const auto report = run_vehicle_eval(cfg);
    const std::string prefix = "case" + std::to_string(++case_id) +
                               "_velweighted_" + case_prefix(cfg);
    emit_both(report, o.out_dir, prefix);
    print_summary(report, prefix);
  }
  return 0;
}

int cmd_report(const std::string& report_path, const std::string& format,
               const std::string& out_dir, const std::string& prefix) {
  const nlohmann::json j = nlohmann::json::parse(read_file(report_path));
  ExperimentConfig cfg = config_from_json(j.at("config").dump());
  // Re-run to recover the traces; the (config, seeds) pair fully
  // determines them.
  const ExperimentReport report = run_case(cfg);
  emit_report(report,
              format == "json" ? ReportFormat::Json : ReportFormat::Csv,
              out_dir, prefix);
  std::cout << "re-emitted " << prefix << " as " << format << " under "
            << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MMAE maneuver identification experiments"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* simulate = app.add_subcommand(
      "simulate", "generate a synthetic measurement series (CSV + metadata)");
  add_common(simulate, opts);

  std::string series_path;
  auto* identify = app.add_subcommand(
      "identify", "run the filter bank over a measurement series file");
  add_common(identify, opts);
  identify->add_option("--series", series_path, "series CSV file")
      ->required();

  std::string axis = "q";
  std::vector<double> sweep_values;
  auto* tune = app.add_subcommand(
      "tune-sweep", "tuning-stage noise sweep over model-truth runs");
  add_common(tune, opts);
  tune->add_option("--axis", axis, "swept axis: q | r");
  tune->add_option("--values", sweep_values,
                   "swept variances (default: the built-in grid)");

  bool full_grid = false;
  auto* vehicle = app.add_subcommand(
      "vehicle-eval", "evaluation against the single-track vehicle model");
  add_common(vehicle, opts);
  vehicle->add_flag("--grid", full_grid,
                    "run the full default Q/R grid plus the "
                    "velocity-weighted cases");

  std::string report_path, report_format = "csv", report_prefix = "report";
  auto* report = app.add_subcommand(
      "report", "re-emit a JSON report in another format");
  report->add_option("--report", report_path, "report JSON file")->required();
  report->add_option("--format", report_format, "csv | json");
  report->add_option("--out-dir", opts.out_dir, "output directory");
  report->add_option("--prefix", report_prefix, "output file prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(opts);
    if (identify->parsed()) return cmd_identify(opts, series_path);
    if (tune->parsed()) return cmd_tune_sweep(opts, axis, sweep_values);
    if (vehicle->parsed()) return cmd_vehicle_eval(opts, full_grid);
    if (report->parsed()) {
      return cmd_report(report_path, report_format, opts.out_dir,
                        report_prefix);
    }
  } catch (const mmae::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mmae::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const mmae::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
