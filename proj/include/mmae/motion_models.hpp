#pragma once

#include <string>

#include "mmae/types.hpp"

namespace mmae {

enum class ManeuverKind { Straight, LeftLC, RightLC };
enum class Direction { Left, Right };

/// Which Jacobian the lane-change EKFs use. Simplified evaluates the
/// trig terms at x_k and omits the sine term in d(vy')/d(vx);
/// ExactAnalytic differentiates the discrete recursion exactly.
enum class JacobianMode { Simplified, ExactAnalytic };

std::string to_string(ManeuverKind kind);
ManeuverKind maneuver_from_string(const std::string& name);
std::string to_string(JacobianMode mode);
JacobianMode jacobian_mode_from_string(const std::string& name);

struct LaneChangeParams {
  double lane_width = 3.5;       // w_L (m)
  double maneuver_length = 150;  // L (m)
  double sample_time = 0.01;     // Ts (s)

  void validate() const;
};

/// One maneuver hypothesis. Straight ignores everything in params
/// except the sample time.
struct ManeuverModel {
  ManeuverKind kind = ManeuverKind::Straight;
  LaneChangeParams params;
};

/// Constant-velocity transition matrix
/// [1 Ts 0 0; 0 1 0 0; 0 0 1 Ts; 0 0 0 1].
Mat4 straight_transition(double sample_time);

/// One step of the discrete lane-change recursion:
///   x' = x + vx*Ts, vx' = vx, y' = y + vy*Ts,
///   vy' = -(w_L*pi*vx)/(2L) * sin(pi*(x' - x_origin)/L)
/// with the left variant phase-shifted by -pi. x_origin anchors the
/// maneuver so banks initialized at nonzero x still start at the
/// beginning of the sinusoid.
StateVector lane_change_propagate(const StateVector& state,
                                  const LaneChangeParams& params,
                                  Direction direction, double x_origin = 0.0);

/// State Jacobian of the lane-change step in the selected mode.
Mat4 lane_change_jacobian(const StateVector& state,
                          const LaneChangeParams& params, Direction direction,
                          JacobianMode mode, double x_origin = 0.0);

/// Constant position-observation matrix H = [1 0 0 0; 0 0 1 0].
Mat24 measurement_matrix();

/// Closed-form lateral offset y(dx) = (w_L/2) cos(pi*dx/L) of the
/// reference sinusoid (left variant phase-shifted). Cross-check and
/// plotting helper only; the filters never call this.
/// Throws ConfigError for dx outside [0, L].
double reference_lane_change_path(double dx, const LaneChangeParams& params,
                                  Direction direction);

}  // namespace mmae
