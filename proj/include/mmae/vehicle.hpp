#pragma once

#include "mmae/motion_models.hpp"
#include "mmae/types.hpp"

namespace mmae {

/// Single-track (bicycle) model parameters with a linear tire model.
struct VehicleParams {
  double mass = 1500.0;             // kg
  double yaw_inertia = 2500.0;      // kg m^2
  double lf = 1.2;                  // CG to front axle (m)
  double lr = 1.6;                  // CG to rear axle (m)
  double cornering_front = 80000.0; // N/rad
  double cornering_rear = 80000.0;  // N/rad

  void validate() const;
};

/// Ground-truth dynamic state in the global frame.
struct VehicleState {
  double x = 0.0;        // global X (m)
  double y = 0.0;        // global Y (m)
  double yaw = 0.0;      // psi (rad)
  double vx = 0.0;       // body longitudinal velocity (m/s)
  double vy = 0.0;       // body lateral velocity (m/s)
  double yaw_rate = 0.0; // rad/s
};

enum class SteeringKind { Zero, SinusoidLC };

/// Open-loop steering command. SinusoidLC applies one full sine period
/// starting at start_time; Right is the sign that decreases Y.
struct SteeringProfile {
  SteeringKind kind = SteeringKind::Zero;
  double amplitude = 0.0;  // rad
  double period = 6.0;     // s
  Direction direction = Direction::Right;
  double start_time = 0.0; // s

  void validate() const;
};

/// Three-DOF equations of motion with linear lateral tire forces and
/// zero longitudinal force (constant-speed runs). Throws ConfigError
/// when vx is too small for the slip angles to be well-defined.
VehicleState dynamics_derivative(const VehicleState& state, double steering,
                                 const VehicleParams& params);

/// Classical RK4 step with the steering angle held constant.
VehicleState step_rk4(const VehicleState& state, double steering,
                      const VehicleParams& params, double dt);

/// RK4 step that evaluates the steering profile at the stage times
/// t, t+dt/2, t+dt, preserving 4th-order accuracy under time-varying
/// steering. The simulation harness steps with this.
VehicleState step_rk4_profile(const VehicleState& state,
                              const SteeringProfile& profile, double t,
                              const VehicleParams& params, double dt);

double steering_profile_eval(const SteeringProfile& profile, double t);

/// Closed-form steady-state yaw rate of the linear bicycle model under
/// constant steering; oracle for cornering behavior.
double steady_state_yaw_rate(const VehicleParams& params, double vx,
                             double steering);

/// Bisects the sinusoid amplitude until one full steering period moves
/// the vehicle laterally by target_offset (within 1 cm). Throws
/// ConfigError if no amplitude in (0, 0.5 rad] brackets the target.
double calibrate_amplitude(const VehicleParams& params, double vx,
                           double period, double target_offset,
                           double dt = 0.01);

}  // namespace mmae
