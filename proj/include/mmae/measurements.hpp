#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmae/motion_models.hpp"
#include "mmae/rng.hpp"
#include "mmae/vehicle.hpp"

namespace mmae {

/// Additive white Gaussian noise configuration. process_cov, when set,
/// perturbs the model-truth recursion each step; the vehicle generator
/// ignores it and relies on model mismatch instead.
struct NoiseSpec {
  Mat2 measurement_cov = Mat2::Zero();
  std::optional<Mat4> process_cov;
};

struct MeasurementSample {
  double t = 0.0;
  double zx = 0.0;
  double zy = 0.0;
};

/// A synthetic measurement run: noisy position samples plus the
/// parallel road-frame truth, fully determined by (config, seed).
struct MeasurementSeries {
  std::vector<MeasurementSample> samples;
  std::vector<StateVector> truth;
  std::uint64_t seed = 0;
  double sample_time = 0.01;
};

/// Propagates the maneuver model's discrete recursion, optionally with
/// per-step process noise, and projects through H with measurement
/// noise. Sample k sits at t = k*Ts (k = 1..n_steps).
MeasurementSeries generate_from_model(const ManeuverModel& model,
                                      const StateVector& x0, int n_steps,
                                      const NoiseSpec& spec,
                                      std::uint64_t seed);

/// Ground truth from the single-track simulation. The road frame
/// coincides with the global frame (straight roads), so z = (X, Y)
/// plus measurement noise at rate 1/Ts.
struct VehicleScenario {
  VehicleParams vehicle;
  SteeringProfile steering;
  double initial_speed = 10.0;  // m/s
  double duration = 6.0;        // s
  double sample_time = 0.01;    // Ts, also the RK4 step
};

MeasurementSeries generate_from_vehicle(const VehicleScenario& scenario,
                                        const NoiseSpec& spec,
                                        std::uint64_t seed);

/// CSV: header `t,zx,zy,truth_x,truth_vx,truth_y,truth_vy`, 9
/// significant digits. The sidecar JSON (same path + ".meta.json")
/// carries config, seed and RNG identifier.
void write_series_csv(const MeasurementSeries& series,
                      const std::string& path,
                      const std::string& config_json);

MeasurementSeries read_series_csv(const std::string& path);

/// Formats a double with 9 significant digits, the precision used in
/// every CSV this library writes.
std::string format_value(double v);

}  // namespace mmae
