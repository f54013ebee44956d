#include "mmae/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

namespace mmae {

using nlohmann::json;

std::string to_string(Stage stage) {
  return stage == Stage::ModelTruth ? "model" : "vehicle";
}

Stage stage_from_string(const std::string& name) {
  if (name == "model") return Stage::ModelTruth;
  if (name == "vehicle") return Stage::VehicleTruth;
  throw ConfigError("unknown stage: " + name);
}

void ExperimentConfig::validate() const {
  if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  if (sample_time <= 0) throw ConfigError("sample_time must be positive");
  if (run_duration <= 0) throw ConfigError("run_duration must be positive");
  if (lane_width <= 0) throw ConfigError("lane_width must be positive");
  if (maneuver_length <= 0) {
    throw ConfigError("maneuver_length must be positive");
  }
  if (policy.threshold <= 1.0 / 3.0 || policy.threshold > 1.0) {
    throw ConfigError("policy.threshold must lie in (1/M, 1]");
  }
  if (policy.dwell < 0) throw ConfigError("policy.dwell must be >= 0");
  if ((q_diag.array() < 0).any() || (r_diag.array() < 0).any() ||
      (p0_diag.array() < 0).any()) {
    throw ConfigError("noise diagonals must be non-negative");
  }
  if (stage == Stage::VehicleTruth) {
    vehicle.validate();
    if (vehicle_speed <= 0) throw ConfigError("vehicle_speed must be positive");
    if (steering_period <= 0) {
      throw ConfigError("steering_period must be positive");
    }
  }
}

ExperimentConfig default_vehicle_config() {
  ExperimentConfig cfg;
  cfg.stage = Stage::VehicleTruth;
  cfg.maneuver = ManeuverKind::RightLC;
  cfg.q_diag = Vec4::Constant(0.005);
  cfg.maneuver_length = 60.0;
  cfg.steering_period = 6.0;
  cfg.run_duration = 6.0;
  return cfg;
}

std::vector<ManeuverKind> bank_model_order() {
  return {ManeuverKind::Straight, ManeuverKind::LeftLC, ManeuverKind::RightLC};
}

SeedResult run_bank_over_series(const ExperimentConfig& cfg,
                                const MeasurementSeries& series,
                                std::uint64_t seed) {
  const LaneChangeParams params{cfg.lane_width, cfg.maneuver_length,
                                cfg.sample_time};
  std::vector<ManeuverModel> models;
  for (ManeuverKind kind : bank_model_order()) {
    models.push_back({kind, params});
  }
  NoiseConfig noise;
  // q_diag is a continuous-time noise intensity; the filters receive the
  // discretized per-step covariance Q*Ts.
  noise.process = Mat4((cfg.q_diag * cfg.sample_time).asDiagonal());
  noise.measurement = cfg.r_diag.asDiagonal();
  const std::vector<NoiseConfig> noises(models.size(), noise);

  FilterBank bank = init_bank(models, cfg.x0, Mat4(cfg.p0_diag.asDiagonal()),
                              noises, cfg.jacobian_mode);

  SeedResult result;
  result.seed = seed;

  std::vector<std::vector<double>> trace;
  trace.reserve(series.samples.size() + 1);
  trace.push_back(bank.weights);
  result.estimates.push_back(cfg.x0);
  result.truth_xy.push_back(
      Vec2(cfg.x0[idx::kX], cfg.x0[idx::kY]));

  for (size_t i = 0; i < series.samples.size(); ++i) {
    Vec2 z(series.samples[i].zx, series.samples[i].zy);
    bank_step(bank, z);
    trace.push_back(bank.weights);
    result.estimates.push_back(combine(bank).mean);
    result.truth_xy.push_back(Vec2(series.truth[i][idx::kX],
                                   series.truth[i][idx::kY]));
  }

  result.detection =
      detect(trace, bank_model_order(), cfg.policy, cfg.sample_time);

  // Early-confusion interval and weight fluctuation over the trace.
  const size_t detect_idx =
      result.detection.detection_time
          ? static_cast<size_t>(std::llround(*result.detection.detection_time /
                                             cfg.sample_time))
          : trace.size();
  const size_t straight_idx = 0;
  for (size_t i = 0; i < std::min(detect_idx, trace.size()); ++i) {
    const auto& w = trace[i];
    // Straight must strictly dominate; the uniform initial tie doesn't count.
    bool strict_max = cfg.maneuver != ManeuverKind::Straight;
    for (size_t j = 1; j < w.size(); ++j) {
      if (w[j] >= w[straight_idx]) strict_max = false;
    }
    if (strict_max) result.confusion_time += cfg.sample_time;
  }
  // Sample variance of each model's weight over the trace, summed over
  // models; noisier measurements make the traces visibly busier.
  double fluct = 0.0;
  if (trace.size() > 1) {
    const double n = static_cast<double>(trace.size());
    for (size_t j = 0; j < trace.front().size(); ++j) {
      double mean = 0.0;
      for (const auto& w : trace) mean += w[j];
      mean /= n;
      double var = 0.0;
      for (const auto& w : trace) var += (w[j] - mean) * (w[j] - mean);
      fluct += var / (n - 1.0);
    }
  }
  result.weight_fluctuation = fluct;
  return result;
}

namespace {

MeasurementSeries make_series(const ExperimentConfig& cfg, std::uint64_t seed,
                              std::optional<double> amplitude) {
  NoiseSpec spec;
  spec.measurement_cov = cfg.r_diag.asDiagonal();
  if (cfg.stage == Stage::ModelTruth) {
    if (cfg.truth_process_noise) {
      // Same per-step statistics the filters assume.
      spec.process_cov = Mat4((cfg.q_diag * cfg.sample_time).asDiagonal());
    }
    const ManeuverModel truth_model{
        cfg.maneuver,
        {cfg.lane_width, cfg.maneuver_length, cfg.sample_time}};
    const int n_steps =
        static_cast<int>(std::round(cfg.run_duration / cfg.sample_time));
    return generate_from_model(truth_model, cfg.x0, n_steps, spec, seed);
  }

  VehicleScenario scenario;
  scenario.vehicle = cfg.vehicle;
  scenario.initial_speed = cfg.vehicle_speed;
  scenario.duration = cfg.run_duration;
  scenario.sample_time = cfg.sample_time;
  if (cfg.maneuver == ManeuverKind::Straight) {
    scenario.steering.kind = SteeringKind::Zero;
  } else {
    scenario.steering.kind = SteeringKind::SinusoidLC;
    scenario.steering.direction = cfg.maneuver == ManeuverKind::LeftLC
                                      ? Direction::Left
                                      : Direction::Right;
    scenario.steering.period = cfg.steering_period;
    scenario.steering.amplitude = amplitude.value();
  }
  return generate_from_vehicle(scenario, spec, seed);
}

double quantile(std::vector<double> sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = p * (static_cast<double>(sorted.size()) - 1.0);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

ExperimentReport run_case(const ExperimentConfig& cfg) {
  cfg.validate();

  std::optional<double> amplitude = cfg.steering_amplitude;
  if (cfg.stage == Stage::VehicleTruth &&
      cfg.maneuver != ManeuverKind::Straight && !amplitude) {
    amplitude = calibrate_amplitude(cfg.vehicle, cfg.vehicle_speed,
                                    cfg.steering_period, cfg.lane_width,
                                    cfg.sample_time);
  }

  ExperimentReport report;
  report.config = cfg;
  report.config.steering_amplitude = amplitude;

  std::vector<double> times;
  double confusion_sum = 0.0;
  double fluct_sum = 0.0;
  for (int i = 0; i < cfg.n_seeds; ++i) {
    const std::uint64_t seed = cfg.seed0 + static_cast<std::uint64_t>(i);
    const MeasurementSeries series = make_series(cfg, seed, amplitude);
    SeedResult r = run_bank_over_series(cfg, series, seed);
    confusion_sum += r.confusion_time;
    fluct_sum += r.weight_fluctuation;
    if (r.detection.detected && *r.detection.detected == cfg.maneuver) {
      times.push_back(*r.detection.detection_time);
    }
    report.seeds.push_back(std::move(r));
  }

  std::sort(times.begin(), times.end());
  report.median_detection_time = quantile(times, 0.5);
  report.iqr_detection_time =
      times.empty() ? std::numeric_limits<double>::quiet_NaN()
                    : quantile(times, 0.75) - quantile(times, 0.25);
  report.not_detected_fraction =
      1.0 - static_cast<double>(times.size()) / cfg.n_seeds;
  report.mean_confusion_time = confusion_sum / cfg.n_seeds;
  report.mean_weight_fluctuation = fluct_sum / cfg.n_seeds;
  return report;
}

std::vector<ExperimentReport> run_sweep(const ExperimentConfig& base,
                                        SweepAxis axis,
                                        const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep values must be nonempty");
  if (!std::is_sorted(values.begin(), values.end())) {
    throw ConfigError("sweep values must be sorted ascending");
  }
  std::vector<ExperimentReport> reports;
  for (double v : values) {
    ExperimentConfig cfg = base;
    if (axis == SweepAxis::Q) {
      cfg.q_diag = Vec4::Constant(v);
    } else {
      cfg.r_diag = Vec2::Constant(v);
    }
    reports.push_back(run_case(cfg));
  }
  return reports;
}

ExperimentReport run_vehicle_eval(const ExperimentConfig& cfg) {
  if (cfg.stage != Stage::VehicleTruth) {
    throw ConfigError("run_vehicle_eval requires stage=vehicle");
  }
  return run_case(cfg);
}

std::vector<double> tuning_q_grid() { return {0.001, 0.01, 0.1, 1.0}; }
std::vector<double> tuning_r_grid() { return {0.0025, 0.01, 0.04}; }
std::vector<double> vehicle_q_grid() { return {0.005, 0.01, 0.025, 0.05}; }
std::vector<double> vehicle_r_grid() { return {0.0025, 0.01}; }

std::vector<Vec4> vehicle_velocity_weighted_q() {
  return {(Vec4() << 0.001, 0.05, 0.001, 0.05).finished(),
          (Vec4() << 0.005, 0.1, 0.005, 0.1).finished()};
}

namespace {

json vec_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

template <typename Vec>
Vec diag_from_json(const json& j, const char* field) {
  Vec out;
  if (j.is_number()) {
    out.setConstant(j.get<double>());
    return out;
  }
  if (j.is_array() && static_cast<int>(j.size()) == out.size()) {
    for (int i = 0; i < out.size(); ++i) out[i] = j[i].get<double>();
    return out;
  }
  throw ConfigError(std::string("field '") + field +
                    "' must be a scalar or an array of matching length");
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["stage"] = to_string(cfg.stage);
  j["maneuver"] = to_string(cfg.maneuver);
  j["q"] = vec_to_json(cfg.q_diag);
  j["r"] = vec_to_json(cfg.r_diag);
  j["p0"] = vec_to_json(cfg.p0_diag);
  j["x0"] = vec_to_json(cfg.x0);
  j["lane_width"] = cfg.lane_width;
  j["maneuver_length"] = cfg.maneuver_length;
  j["sample_time"] = cfg.sample_time;
  j["run_duration"] = cfg.run_duration;
  j["threshold"] = cfg.policy.threshold;
  j["dwell"] = cfg.policy.dwell;
  j["jacobian_mode"] = to_string(cfg.jacobian_mode);
  j["n_seeds"] = cfg.n_seeds;
  j["seed0"] = cfg.seed0;
  j["truth_process_noise"] = cfg.truth_process_noise;
  j["vehicle"] = {{"mass", cfg.vehicle.mass},
                  {"yaw_inertia", cfg.vehicle.yaw_inertia},
                  {"lf", cfg.vehicle.lf},
                  {"lr", cfg.vehicle.lr},
                  {"cornering_front", cfg.vehicle.cornering_front},
                  {"cornering_rear", cfg.vehicle.cornering_rear}};
  j["vehicle_speed"] = cfg.vehicle_speed;
  j["steering_period"] = cfg.steering_period;
  if (cfg.steering_amplitude) {
    j["steering_amplitude"] = *cfg.steering_amplitude;
  }
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("stage")) cfg.stage = stage_from_string(j["stage"]);
    if (j.contains("maneuver")) {
      cfg.maneuver = maneuver_from_string(j["maneuver"]);
    }
    if (cfg.stage == Stage::VehicleTruth) {
      // Vehicle-stage defaults before field overrides.
      const ExperimentConfig base = default_vehicle_config();
      cfg.q_diag = base.q_diag;
      cfg.maneuver_length = base.maneuver_length;
      cfg.steering_period = base.steering_period;
      cfg.run_duration = base.run_duration;
      cfg.truth_process_noise = base.truth_process_noise;
      cfg.policy = base.policy;
    }
    if (j.contains("q")) cfg.q_diag = diag_from_json<Vec4>(j["q"], "q");
    if (j.contains("r")) cfg.r_diag = diag_from_json<Vec2>(j["r"], "r");
    if (j.contains("p0")) cfg.p0_diag = diag_from_json<Vec4>(j["p0"], "p0");
    if (j.contains("x0")) {
      for (int i = 0; i < 4; ++i) cfg.x0[i] = j["x0"][i].get<double>();
    }
    if (j.contains("lane_width")) cfg.lane_width = j["lane_width"];
    if (j.contains("maneuver_length")) {
      cfg.maneuver_length = j["maneuver_length"];
    }
    if (j.contains("sample_time")) cfg.sample_time = j["sample_time"];
    if (j.contains("run_duration")) cfg.run_duration = j["run_duration"];
    if (j.contains("threshold")) cfg.policy.threshold = j["threshold"];
    if (j.contains("dwell")) cfg.policy.dwell = j["dwell"];
    if (j.contains("jacobian_mode")) {
      cfg.jacobian_mode = jacobian_mode_from_string(j["jacobian_mode"]);
    }
    if (j.contains("n_seeds")) cfg.n_seeds = j["n_seeds"];
    if (j.contains("seed0")) cfg.seed0 = j["seed0"];
    if (j.contains("truth_process_noise")) {
      cfg.truth_process_noise = j["truth_process_noise"];
    }
    if (j.contains("vehicle")) {
      const json& v = j["vehicle"];
      if (v.contains("mass")) cfg.vehicle.mass = v["mass"];
      if (v.contains("yaw_inertia")) cfg.vehicle.yaw_inertia = v["yaw_inertia"];
      if (v.contains("lf")) cfg.vehicle.lf = v["lf"];
      if (v.contains("lr")) cfg.vehicle.lr = v["lr"];
      if (v.contains("cornering_front")) {
        cfg.vehicle.cornering_front = v["cornering_front"];
      }
      if (v.contains("cornering_rear")) {
        cfg.vehicle.cornering_rear = v["cornering_rear"];
      }
    }
    if (j.contains("vehicle_speed")) cfg.vehicle_speed = j["vehicle_speed"];
    if (j.contains("steering_period")) {
      cfg.steering_period = j["steering_period"];
    }
    if (j.contains("steering_amplitude")) {
      cfg.steering_amplitude = j["steering_amplitude"].get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config field: ") + e.what());
  }
  return cfg;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // FNV-1a over the canonical JSON dump.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : config_to_json(cfg)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string report_to_json(const ExperimentReport& report) {
  json j;
  j["config"] = json::parse(config_to_json(report.config));
  j["config_hash"] = config_hash(report.config);
  j["median_detection_time"] = report.median_detection_time;
  j["iqr_detection_time"] = report.iqr_detection_time;
  j["not_detected_fraction"] = report.not_detected_fraction;
  j["mean_confusion_time"] = report.mean_confusion_time;
  j["mean_weight_fluctuation"] = report.mean_weight_fluctuation;
  json seeds = json::array();
  for (const auto& s : report.seeds) {
    json e;
    e["seed"] = s.seed;
    e["detected"] =
        s.detection.detected ? to_string(*s.detection.detected) : "none";
    if (s.detection.detection_time) {
      e["detection_time"] = *s.detection.detection_time;
    }
    e["switch_count"] = s.detection.switch_count;
    e["confusion_time"] = s.confusion_time;
    e["weight_fluctuation"] = s.weight_fluctuation;
    seeds.push_back(e);
  }
  j["seeds"] = seeds;
  return j.dump(2);
}

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::string& out_dir, const std::string& prefix) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  const std::filesystem::path dir(out_dir);

  if (format == ReportFormat::Json) {
    const auto path = dir / (prefix + "_report.json");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << report_to_json(report) << '\n';
    return;
  }

  const auto table_path = dir / (prefix + "_table.csv");
  std::ofstream table(table_path);
  if (!table) throw IoError("cannot open for writing: " + table_path.string());
  table << "seed,detected,detection_time,switch_count,confusion_time,"
           "weight_fluctuation\n";
  for (const auto& s : report.seeds) {
    table << s.seed << ','
          << (s.detection.detected ? to_string(*s.detection.detected)
                                   : "none")
          << ','
          << (s.detection.detection_time
                  ? format_value(*s.detection.detection_time)
                  : "")
          << ',' << s.detection.switch_count << ','
          << format_value(s.confusion_time) << ','
          << format_value(s.weight_fluctuation) << '\n';
  }

  for (const auto& s : report.seeds) {
    const auto trace_path =
        dir / (prefix + "_seed" + std::to_string(s.seed) + "_trace.csv");
    std::ofstream out(trace_path);
    if (!out) throw IoError("cannot open for writing: " + trace_path.string());
    out << "t,w_straight,w_left,w_right,est_x,est_vx,est_y,est_vy,"
           "truth_x,truth_y\n";
    for (size_t i = 0; i < s.detection.weight_trace.size(); ++i) {
      const auto& w = s.detection.weight_trace[i];
      const auto& est = s.estimates[i];
      out << format_value(i * report.config.sample_time) << ','
          << format_value(w[0]) << ',' << format_value(w[1]) << ','
          << format_value(w[2]) << ',' << format_value(est[idx::kX]) << ','
          << format_value(est[idx::kVx]) << ',' << format_value(est[idx::kY])
          << ',' << format_value(est[idx::kVy]) << ','
          << format_value(s.truth_xy[i][0]) << ','
          << format_value(s.truth_xy[i][1]) << '\n';
    }
  }
}

}  // namespace mmae
