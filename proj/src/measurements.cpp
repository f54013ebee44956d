#include "mmae/measurements.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mmae {

namespace {

StateVector propagate_truth(const ManeuverModel& model, const StateVector& s,
                            double x_origin) {
  switch (model.kind) {
    case ManeuverKind::Straight:
      return straight_transition(model.params.sample_time) * s;
    case ManeuverKind::LeftLC:
      return lane_change_propagate(s, model.params, Direction::Left, x_origin);
    case ManeuverKind::RightLC:
      return lane_change_propagate(s, model.params, Direction::Right,
                                   x_origin);
  }
  throw ConfigError("unknown maneuver kind");
}

}  // namespace

MeasurementSeries generate_from_model(const ManeuverModel& model,
                                      const StateVector& x0, int n_steps,
                                      const NoiseSpec& spec,
                                      std::uint64_t seed) {
  if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
  model.params.validate();

  CounterRng rng(seed);
  const Mat24 h = measurement_matrix();
  const double ts = model.params.sample_time;
  const double x_origin = x0[idx::kX];

  MeasurementSeries series;
  series.seed = seed;
  series.sample_time = ts;
  series.samples.reserve(n_steps);
  series.truth.reserve(n_steps);

  StateVector truth = x0;
  for (int k = 1; k <= n_steps; ++k) {
    truth = propagate_truth(model, truth, x_origin);
    if (spec.process_cov) {
      truth += rng.next_gaussian4(*spec.process_cov);
    }
    const Vec2 z = h * truth + rng.next_gaussian2(spec.measurement_cov);
    series.samples.push_back({k * ts, z[0], z[1]});
    series.truth.push_back(truth);
  }
  return series;
}

MeasurementSeries generate_from_vehicle(const VehicleScenario& scenario,
                                        const NoiseSpec& spec,
                                        std::uint64_t seed) {
  scenario.vehicle.validate();
  scenario.steering.validate();
  if (scenario.duration <= 0 || scenario.sample_time <= 0) {
    throw ConfigError("vehicle scenario duration and sample_time must be "
                      "positive");
  }

  CounterRng rng(seed);
  const double ts = scenario.sample_time;
  const int n_steps = static_cast<int>(std::round(scenario.duration / ts));

  MeasurementSeries series;
  series.seed = seed;
  series.sample_time = ts;
  series.samples.reserve(n_steps);
  series.truth.reserve(n_steps);

  VehicleState s;
  s.vx = scenario.initial_speed;
  for (int k = 1; k <= n_steps; ++k) {
    s = step_rk4_profile(s, scenario.steering, (k - 1) * ts, scenario.vehicle,
                         ts);
    // Road-frame truth: global velocities resolved from body frame.
    StateVector truth;
    truth[idx::kX] = s.x;
    truth[idx::kVx] = s.vx * std::cos(s.yaw) - s.vy * std::sin(s.yaw);
    truth[idx::kY] = s.y;
    truth[idx::kVy] = s.vx * std::sin(s.yaw) + s.vy * std::cos(s.yaw);

    Vec2 z;
    z << truth[idx::kX], truth[idx::kY];
    z += rng.next_gaussian2(spec.measurement_cov);
    series.samples.push_back({k * ts, z[0], z[1]});
    series.truth.push_back(truth);
  }
  return series;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_series_csv(const MeasurementSeries& series, const std::string& path,
                      const std::string& config_json) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "t,zx,zy,truth_x,truth_vx,truth_y,truth_vy\n";
  for (size_t i = 0; i < series.samples.size(); ++i) {
    const auto& s = series.samples[i];
    const auto& x = series.truth[i];
    out << format_value(s.t) << ',' << format_value(s.zx) << ','
        << format_value(s.zy) << ',' << format_value(x[idx::kX]) << ','
        << format_value(x[idx::kVx]) << ',' << format_value(x[idx::kY]) << ','
        << format_value(x[idx::kVy]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);

  nlohmann::json meta;
  meta["rng"] = kRngAlgorithm;
  meta["seed"] = series.seed;
  meta["sample_time"] = series.sample_time;
  meta["config"] = config_json.empty()
                       ? nlohmann::json::object()
                       : nlohmann::json::parse(config_json);
  std::ofstream meta_out(path + ".meta.json");
  if (!meta_out) throw IoError("cannot open for writing: " + path + ".meta.json");
  meta_out << meta.dump(2) << '\n';
}

MeasurementSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty series file: " + path);

  MeasurementSeries series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    double vals[7];
    for (int i = 0; i < 7; ++i) {
      if (!std::getline(ss, field, ',')) {
        throw IoError("malformed series row in " + path + ": " + line);
      }
      vals[i] = std::stod(field);
    }
    series.samples.push_back({vals[0], vals[1], vals[2]});
    StateVector truth;
    truth << vals[3], vals[4], vals[5], vals[6];
    series.truth.push_back(truth);
  }
  if (series.samples.size() >= 2) {
    series.sample_time = series.samples[1].t - series.samples[0].t;
  } else if (series.samples.size() == 1) {
    series.sample_time = series.samples[0].t;
  }
  return series;
}

}  // namespace mmae
