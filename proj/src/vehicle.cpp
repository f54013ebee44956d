#include "mmae/vehicle.hpp"

#include <cmath>

namespace mmae {

void VehicleParams::validate() const {
  if (mass <= 0 || yaw_inertia <= 0 || lf <= 0 || lr <= 0 ||
      cornering_front <= 0 || cornering_rear <= 0) {
    throw ConfigError("vehicle parameters must all be positive");
  }
}

void SteeringProfile::validate() const {
  if (amplitude < 0) throw ConfigError("steering amplitude must be >= 0");
  if (period <= 0) throw ConfigError("steering period must be positive");
}

namespace {

constexpr double kMinSpeed = 0.1;  // m/s, slip-angle validity

VehicleState scaled(const VehicleState& d, double s) {
  return {d.x * s, d.y * s, d.yaw * s, d.vx * s, d.vy * s, d.yaw_rate * s};
}

VehicleState shifted(const VehicleState& s, const VehicleState& d, double h) {
  return {s.x + h * d.x,   s.y + h * d.y,   s.yaw + h * d.yaw,
          s.vx + h * d.vx, s.vy + h * d.vy, s.yaw_rate + h * d.yaw_rate};
}

}  // namespace

VehicleState dynamics_derivative(const VehicleState& s, double steering,
                                 const VehicleParams& p) {
  if (s.vx < kMinSpeed) {
    throw ConfigError("vehicle speed below slip-angle validity threshold");
  }
  const double alpha_front = steering - (s.vy + p.lf * s.yaw_rate) / s.vx;
  const double alpha_rear = -(s.vy - p.lr * s.yaw_rate) / s.vx;
  const double fy_front = p.cornering_front * alpha_front;
  const double fy_rear = p.cornering_rear * alpha_rear;
  const double cos_d = std::cos(steering);
  const double sin_d = std::sin(steering);

  VehicleState d;
  d.x = s.vx * std::cos(s.yaw) - s.vy * std::sin(s.yaw);
  d.y = s.vx * std::sin(s.yaw) + s.vy * std::cos(s.yaw);
  d.yaw = s.yaw_rate;
  // Fx,f = Fx,r = 0: constant-speed runs.
  d.vx = s.vy * s.yaw_rate - fy_front * sin_d / p.mass;
  d.vy = -s.vx * s.yaw_rate + (fy_front * cos_d + fy_rear) / p.mass;
  d.yaw_rate = (p.lf * fy_front * cos_d - p.lr * fy_rear) / p.yaw_inertia;
  return d;
}

VehicleState step_rk4(const VehicleState& s, double steering,
                      const VehicleParams& p, double dt) {
  if (dt <= 0) throw ConfigError("rk4 step size must be positive");
  const VehicleState k1 = dynamics_derivative(s, steering, p);
  const VehicleState k2 =
      dynamics_derivative(shifted(s, k1, 0.5 * dt), steering, p);
  const VehicleState k3 =
      dynamics_derivative(shifted(s, k2, 0.5 * dt), steering, p);
  const VehicleState k4 = dynamics_derivative(shifted(s, k3, dt), steering, p);

  VehicleState sum = scaled(k1, 1.0);
  sum = shifted(sum, k2, 2.0);
  sum = shifted(sum, k3, 2.0);
  sum = shifted(sum, k4, 1.0);
  return shifted(s, sum, dt / 6.0);
}

VehicleState step_rk4_profile(const VehicleState& s,
                              const SteeringProfile& profile, double t,
                              const VehicleParams& p, double dt) {
  if (dt <= 0) throw ConfigError("rk4 step size must be positive");
  const double d0 = steering_profile_eval(profile, t);
  const double dm = steering_profile_eval(profile, t + 0.5 * dt);
  const double d1 = steering_profile_eval(profile, t + dt);
  const VehicleState k1 = dynamics_derivative(s, d0, p);
  const VehicleState k2 = dynamics_derivative(shifted(s, k1, 0.5 * dt), dm, p);
  const VehicleState k3 = dynamics_derivative(shifted(s, k2, 0.5 * dt), dm, p);
  const VehicleState k4 = dynamics_derivative(shifted(s, k3, dt), d1, p);

  VehicleState sum = scaled(k1, 1.0);
  sum = shifted(sum, k2, 2.0);
  sum = shifted(sum, k3, 2.0);
  sum = shifted(sum, k4, 1.0);
  return shifted(s, sum, dt / 6.0);
}

double steering_profile_eval(const SteeringProfile& profile, double t) {
  if (profile.kind == SteeringKind::Zero) return 0.0;
  const double local = t - profile.start_time;
  if (local < 0.0 || local >= profile.period) return 0.0;
  // Positive steering turns left (increases Y), so Right gets the
  // negative sign.
  const double sign = profile.direction == Direction::Right ? -1.0 : 1.0;
  return sign * profile.amplitude *
         std::sin(2.0 * M_PI * local / profile.period);
}

double steady_state_yaw_rate(const VehicleParams& p, double vx,
                             double steering) {
  const double wheelbase = p.lf + p.lr;
  const double understeer =
      p.mass * vx * vx * (p.lr * p.cornering_rear - p.lf * p.cornering_front) /
      (wheelbase * p.cornering_front * p.cornering_rear);
  return vx * steering / (wheelbase + understeer);
}

namespace {

// Net lateral displacement of one full steering period at the given
// amplitude, simulated from an aligned straight-driving state.
double lane_change_offset(const VehicleParams& p, double vx, double period,
                          double amplitude, double dt) {
  SteeringProfile profile{SteeringKind::SinusoidLC, amplitude, period,
                          Direction::Left, 0.0};
  VehicleState s;
  s.vx = vx;
  const int n = static_cast<int>(std::ceil(period / dt));
  for (int i = 0; i < n; ++i) {
    s = step_rk4_profile(s, profile, i * dt, p, dt);
  }
  return s.y;
}

}  // namespace

double calibrate_amplitude(const VehicleParams& p, double vx, double period,
                           double target_offset, double dt) {
  if (target_offset < 0) throw ConfigError("target offset must be >= 0");
  if (target_offset == 0.0) return 0.0;

  double lo = 0.0;
  double hi = 0.5;
  if (lane_change_offset(p, vx, period, hi, dt) < target_offset) {
    throw ConfigError("no steering amplitude in (0, 0.5 rad] reaches the "
                      "requested lateral offset");
  }
  const double tol = 0.01;  // 1 cm on the achieved offset
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double off = lane_change_offset(p, vx, period, mid, dt);
    if (std::abs(off - target_offset) < tol) return mid;
    (off < target_offset ? lo : hi) = mid;
  }
  throw ConfigError("amplitude calibration failed to converge");
}

}  // namespace mmae
