#include "mmae/motion_models.hpp"

#include <cmath>

namespace mmae {

std::string to_string(ManeuverKind kind) {
  switch (kind) {
    case ManeuverKind::Straight:
      return "straight";
    case ManeuverKind::LeftLC:
      return "left";
    case ManeuverKind::RightLC:
      return "right";
  }
  return "unknown";
}

ManeuverKind maneuver_from_string(const std::string& name) {
  if (name == "straight") return ManeuverKind::Straight;
  if (name == "left") return ManeuverKind::LeftLC;
  if (name == "right") return ManeuverKind::RightLC;
  throw ConfigError("unknown maneuver: " + name);
}

std::string to_string(JacobianMode mode) {
  return mode == JacobianMode::Simplified ? "simplified" : "exact";
}

JacobianMode jacobian_mode_from_string(const std::string& name) {
  if (name == "simplified") return JacobianMode::Simplified;
  if (name == "exact") return JacobianMode::ExactAnalytic;
  throw ConfigError("unknown jacobian mode: " + name);
}

void LaneChangeParams::validate() const {
  if (lane_width <= 0) throw ConfigError("lane_width must be positive");
  if (maneuver_length <= 0) {
    throw ConfigError("maneuver_length must be positive");
  }
  if (sample_time <= 0) throw ConfigError("sample_time must be positive");
}

Mat4 straight_transition(double sample_time) {
  Mat4 a = Mat4::Identity();
  a(idx::kX, idx::kVx) = sample_time;
  a(idx::kY, idx::kVy) = sample_time;
  return a;
}

namespace {

// Phase offset of the sinusoid: the left lane change is the right one
// shifted by -pi.
double phase(Direction direction) {
  return direction == Direction::Left ? -M_PI : 0.0;
}

}  // namespace

StateVector lane_change_propagate(const StateVector& state,
                                  const LaneChangeParams& params,
                                  Direction direction, double x_origin) {
  const double ts = params.sample_time;
  const double k = M_PI / params.maneuver_length;
  const double amp = params.lane_width * M_PI / (2.0 * params.maneuver_length);

  StateVector out;
  out[idx::kX] = state[idx::kX] + state[idx::kVx] * ts;
  out[idx::kVx] = state[idx::kVx];
  out[idx::kY] = state[idx::kY] + state[idx::kVy] * ts;
  out[idx::kVy] = -amp * state[idx::kVx] *
                  std::sin(k * (out[idx::kX] - x_origin) + phase(direction));
  return out;
}

Mat4 lane_change_jacobian(const StateVector& state,
                          const LaneChangeParams& params, Direction direction,
                          JacobianMode mode, double x_origin) {
  const double ts = params.sample_time;
  const double k = M_PI / params.maneuver_length;
  const double amp = params.lane_width * M_PI / (2.0 * params.maneuver_length);
  const double vx = state[idx::kVx];

  Mat4 jac = Mat4::Identity();
  jac(idx::kX, idx::kVx) = ts;
  jac(idx::kY, idx::kVy) = ts;
  jac(idx::kVy, idx::kVy) = 0.0;

  if (mode == JacobianMode::Simplified) {
    // Trig terms evaluated at x_k.
    const double arg = k * (state[idx::kX] - x_origin) + phase(direction);
    jac(idx::kVy, idx::kX) = -amp * k * vx * std::cos(arg);
    jac(idx::kVy, idx::kVx) = -amp * std::cos(arg);
  } else {
    // True derivative of the recursion: vy' depends on x_{k+1} = x + vx*Ts,
    // so d(vy')/d(vx) picks up both the sine and a chain-rule cosine term.
    const double x_next = state[idx::kX] + vx * ts;
    const double arg = k * (x_next - x_origin) + phase(direction);
    jac(idx::kVy, idx::kX) = -amp * k * vx * std::cos(arg);
    jac(idx::kVy, idx::kVx) =
        -amp * (std::sin(arg) + vx * k * ts * std::cos(arg));
  }
  return jac;
}

Mat24 measurement_matrix() {
  Mat24 h = Mat24::Zero();
  h(0, idx::kX) = 1.0;
  h(1, idx::kY) = 1.0;
  return h;
}

double reference_lane_change_path(double dx, const LaneChangeParams& params,
                                  Direction direction) {
  if (dx < 0.0 || dx > params.maneuver_length) {
    throw ConfigError("reference path distance outside [0, L]");
  }
  return 0.5 * params.lane_width *
         std::cos(M_PI * dx / params.maneuver_length + phase(direction));
}

}  // namespace mmae
