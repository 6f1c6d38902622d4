#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vws/signal.hpp"

namespace vws {

// Lumped two-inertia drivetrain: motor inertia coupled through a gear ratio
// and an elastic shaft (with symmetric dead-zone backlash) to the driven
// axle, whose inertia includes the vehicle mass reflected at the tire
// radius (no-slip coupling).
struct DrivetrainParams {
  double motor_inertia = 0.05;      // kg m^2
  double wheel_inertia = 1.2;       // kg m^2, per wheel, rim only
  double shaft_stiffness = 8000.0;  // N m / rad
  double shaft_damping = 15.0;      // N m s / rad, engaged contact only
  double backlash_half = 0.03;      // rad, dead-zone half width
  double gear_ratio = 10.0;
  double tire_radius = 0.35;   // m
  double vehicle_mass = 2000.0;  // kg
  double track_width = 1.6;    // m
  double roll_resist = 120.0;  // N
  double drag_coeff = 0.45;    // N s^2 / m^2

  // Axle-side inertia: both wheels plus the vehicle mass seen through the
  // no-slip constraint v = r * omega_w.
  double wheel_side_inertia() const {
    return 2.0 * wheel_inertia + vehicle_mass * tire_radius * tire_radius;
  }

  void validate() const;
};

struct ProfileKnot {
  double t = 0.0;      // s
  double value = 0.0;  // profile units
};

// One scripted driving maneuver. Torque and yaw-rate profiles are
// piecewise linear over the knots (held at the boundary values outside).
struct ManeuverScript {
  std::string name;
  double duration = 0.0;                    // s
  std::vector<ProfileKnot> drive_torque;    // N m at the motor shaft; may be negative (regen)
  std::vector<ProfileKnot> brake_torque;    // N m total on the driven axle, >= 0
  std::vector<ProfileKnot> yaw_rate;        // rad/s, kinematic left/right split only
  double surface_noise_std = 0.0;           // N m, axle disturbance per internal step
  std::vector<std::pair<double, double>> impulse_events;  // (t [s], angular impulse [N m s])

  void validate() const;
};

double profile_value(const std::vector<ProfileKnot>& knots, double t);

// Fixed-step RK4 integration of the two-inertia model at dt, emitted at
// 50 Hz through zoh_resample. Channels: omega_EM_true, omega_RL_true,
// omega_RR_true (split by yaw rate), M_drive, M_brake, shaft_twist_true.
// Deterministic for a fixed (params, script, dt, seed).
SignalFrame simulate(const DrivetrainParams& params, const ManeuverScript& script, double dt,
                     std::uint64_t seed);

inline constexpr double kOutputRate = 50.0;  // Hz

// >= 12 scripts covering standstill tip-ins, tip-in/tip-out load cycling,
// emergency braking, curb impacts, cornering, gravel, and sub-3 km/h
// crawling, with durations summing to total_duration_s. Each scenario class
// appears variants_per_type times with jittered levels so a maneuver-wise
// split still sees every condition class.
std::vector<ManeuverScript> standard_scenario_suite(std::uint64_t seed,
                                                    double total_duration_s = 3600.0,
                                                    std::size_t variants_per_type = 3);

}  // namespace vws
