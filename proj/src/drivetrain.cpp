#include "vws/drivetrain.hpp"

#include <algorithm>
#include <cmath>

#include "vws/error.hpp"
#include "vws/rng.hpp"

namespace vws {

void DrivetrainParams::validate() const {
  const bool ok = motor_inertia > 0.0 && wheel_inertia > 0.0 && shaft_stiffness > 0.0 &&
                  shaft_damping >= 0.0 && backlash_half >= 0.0 && gear_ratio > 0.0 &&
                  tire_radius > 0.0 && vehicle_mass > 0.0 && track_width > 0.0 &&
                  roll_resist >= 0.0 && drag_coeff >= 0.0;
  require(ok, "invalid-params");
}

void ManeuverScript::validate() const {
  require(duration > 0.0, "invalid-script", name + ": duration must be positive");
  const auto check_knots = [&](const std::vector<ProfileKnot>& knots, bool non_negative) {
    double prev = 0.0;
    for (const auto& k : knots) {
      require(k.t >= prev - 1e-12 && k.t <= duration + 1e-9, "invalid-script",
              name + ": knot times must be non-decreasing within [0, duration]");
      require(!non_negative || k.value >= 0.0, "invalid-script",
              name + ": brake torque must be non-negative");
      prev = k.t;
    }
  };
  check_knots(drive_torque, false);
  check_knots(brake_torque, true);
  check_knots(yaw_rate, false);
  require(surface_noise_std >= 0.0, "invalid-script", name + ": negative noise std");
}

double profile_value(const std::vector<ProfileKnot>& knots, double t) {
  if (knots.empty()) return 0.0;
  if (t <= knots.front().t) return knots.front().value;
  if (t >= knots.back().t) return knots.back().value;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (t <= knots[i].t) {
      const auto& a = knots[i - 1];
      const auto& b = knots[i];
      if (b.t <= a.t) return b.value;
      const double w = (t - a.t) / (b.t - a.t);
      return a.value + w * (b.value - a.value);
    }
  }
  return knots.back().value;
}

namespace {

struct SimState {
  double theta_m = 0.0;
  double omega_m = 0.0;
  double theta_w = 0.0;
  double omega_w = 0.0;
};

struct Derivative {
  double theta_m, omega_m, theta_w, omega_w;
};

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

class StepDynamics {
 public:
  StepDynamics(const DrivetrainParams& p, const ManeuverScript& s) : p_(p), script_(s) {}

  double shaft_torque(double twist, double twist_rate) const {
    const double a = p_.backlash_half;
    if (std::abs(twist) <= a) return 0.0;
    return p_.shaft_stiffness * (twist - a * sgn(twist)) + p_.shaft_damping * twist_rate;
  }

  // Axle torque excluding Coulomb friction (brake + rolling resistance).
  double smooth_axle_torque(const SimState& x, double t, double noise) const {
    const double twist = x.theta_m / p_.gear_ratio - x.theta_w;
    const double twist_rate = x.omega_m / p_.gear_ratio - x.omega_w;
    const double v = p_.tire_radius * x.omega_w;
    const double drag = p_.drag_coeff * v * std::abs(v);
    (void)t;
    return shaft_torque(twist, twist_rate) - p_.tire_radius * drag + noise;
  }

  double friction_capacity(double t) const {
    return profile_value(script_.brake_torque, t) + p_.tire_radius * p_.roll_resist;
  }

  Derivative eval(const SimState& x, double t, double noise, bool stick,
                  double friction_dir) const {
    Derivative d{};
    const double twist = x.theta_m / p_.gear_ratio - x.theta_w;
    const double twist_rate = x.omega_m / p_.gear_ratio - x.omega_w;
    const double ts = shaft_torque(twist, twist_rate);
    const double drive = profile_value(script_.drive_torque, t);

    d.theta_m = x.omega_m;
    d.omega_m = (drive - ts / p_.gear_ratio) / p_.motor_inertia;
    d.theta_w = x.omega_w;
    if (stick) {
      d.omega_w = 0.0;
    } else {
      const double t_fric = -friction_dir * friction_capacity(t);
      d.omega_w = (smooth_axle_torque(x, t, noise) + t_fric) / p_.wheel_side_inertia();
    }
    return d;
  }

 private:
  const DrivetrainParams& p_;
  const ManeuverScript& script_;
};

SimState advance(const SimState& x, const Derivative& d, double h) {
  return SimState{x.theta_m + h * d.theta_m, x.omega_m + h * d.omega_m,
                  x.theta_w + h * d.theta_w, x.omega_w + h * d.omega_w};
}

}  // namespace

SignalFrame simulate(const DrivetrainParams& params, const ManeuverScript& script, double dt,
                     std::uint64_t seed) {
  params.validate();
  script.validate();
  require(dt > 0.0 && dt <= 0.02, "invalid-dt");

  const auto n_steps = static_cast<std::size_t>(std::llround(script.duration / dt));
  require(n_steps >= 1, "invalid-script", "duration shorter than one step");

  StepDynamics dyn(params, script);
  Rng rng(mix_seed(seed, 0xd21f));
  SimState x;

  std::vector<double> motor(n_steps), wheel_l(n_steps), wheel_r(n_steps), drive(n_steps),
      brake(n_steps), twist(n_steps);

  // Impulse events sorted by time; applied as instantaneous axle speed jumps.
  auto impulses = script.impulse_events;
  std::sort(impulses.begin(), impulses.end());
  std::size_t next_impulse = 0;

  const double j_side = params.wheel_side_inertia();
  constexpr double kOmegaStick = 1e-6;  // rad/s

  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;

    // Record before stepping: sample k sits at t = k * dt.
    const double yaw = profile_value(script.yaw_rate, t);
    const double half_split = yaw * params.track_width / (2.0 * params.tire_radius);
    motor[k] = x.omega_m;
    wheel_l[k] = x.omega_w - half_split;
    wheel_r[k] = x.omega_w + half_split;
    drive[k] = profile_value(script.drive_torque, t);
    brake[k] = profile_value(script.brake_torque, t);
    twist[k] = x.theta_m / params.gear_ratio - x.theta_w;

    while (next_impulse < impulses.size() && impulses[next_impulse].first < t + dt) {
      x.omega_w += impulses[next_impulse].second / j_side;
      ++next_impulse;
    }

    const double noise =
        script.surface_noise_std > 0.0 ? rng.gaussian(script.surface_noise_std) : 0.0;

    // Coulomb friction mode is frozen per step: stick when the axle is at
    // rest and the smooth torque stays within the brake+rolling capacity,
    // kinetic with fixed direction otherwise.
    const double cap = dyn.friction_capacity(t);
    const double t_smooth = dyn.smooth_axle_torque(x, t, noise);
    const bool at_rest = std::abs(x.omega_w) < kOmegaStick;
    const bool stick = at_rest && std::abs(t_smooth) <= cap;
    double fric_dir = 0.0;
    if (!stick) fric_dir = at_rest ? sgn(t_smooth) : sgn(x.omega_w);
    if (stick) x.omega_w = 0.0;

    const Derivative k1 = dyn.eval(x, t, noise, stick, fric_dir);
    const Derivative k2 = dyn.eval(advance(x, k1, dt / 2.0), t + dt / 2.0, noise, stick, fric_dir);
    const Derivative k3 = dyn.eval(advance(x, k2, dt / 2.0), t + dt / 2.0, noise, stick, fric_dir);
    const Derivative k4 = dyn.eval(advance(x, k3, dt), t + dt, noise, stick, fric_dir);

    const double prev_omega_w = x.omega_w;
    x.theta_m += dt / 6.0 * (k1.theta_m + 2.0 * k2.theta_m + 2.0 * k3.theta_m + k4.theta_m);
    x.omega_m += dt / 6.0 * (k1.omega_m + 2.0 * k2.omega_m + 2.0 * k3.omega_m + k4.omega_m);
    x.theta_w += dt / 6.0 * (k1.theta_w + 2.0 * k2.theta_w + 2.0 * k3.theta_w + k4.theta_w);
    x.omega_w += dt / 6.0 * (k1.omega_w + 2.0 * k2.omega_w + 2.0 * k3.omega_w + k4.omega_w);

    // Friction must not push the axle through zero.
    if (!stick && cap > 1e-12 && prev_omega_w != 0.0 && sgn(x.omega_w) != sgn(prev_omega_w))
      x.omega_w = 0.0;

    if (!(std::isfinite(x.theta_m) && std::isfinite(x.omega_m) && std::isfinite(x.theta_w) &&
          std::isfinite(x.omega_w)))
      fail("unstable-integration", "step " + std::to_string(k));
  }

  SignalFrame internal;
  internal.sample_rate = 1.0 / dt;
  internal.add_channel(channels::kMotorTrue, std::move(motor));
  internal.add_channel(channels::kWheelLeftTrue, std::move(wheel_l));
  internal.add_channel(channels::kWheelRightTrue, std::move(wheel_r));
  internal.add_channel(channels::kDriveTorque, std::move(drive));
  internal.add_channel(channels::kBrakeTorque, std::move(brake));
  internal.add_channel(channels::kTwistTrue, std::move(twist));
  internal.segments.push_back({script.name, 0, n_steps});
  return zoh_resample(internal, kOutputRate);
}

namespace {

// Builders assemble repeated fixed-length cycles until the share duration
// is filled, so scenarios stay physically plausible at any total duration.
class ScriptBuilder {
 public:
  ScriptBuilder(std::string name, double duration) {
    script_.name = std::move(name);
    script_.duration = duration;
  }

  double duration() const { return script_.duration; }

  void drive(double t, double value) { push(script_.drive_torque, t, value); }
  void brake(double t, double value) { push(script_.brake_torque, t, value); }
  void yaw(double t, double value) { push(script_.yaw_rate, t, value); }
  void impulse(double t, double value) {
    if (t < script_.duration) script_.impulse_events.emplace_back(t, value);
  }
  void noise(double std) { script_.surface_noise_std = std; }

  // Step with short linear ramps; profiles are held outside their knots.
  void drive_pulse(double t_on, double t_off, double level, double ramp = 0.25) {
    drive(t_on, 0.0);
    drive(t_on + ramp, level);
    drive(t_off, level);
    drive(t_off + ramp, 0.0);
  }
  void brake_pulse(double t_on, double t_off, double level, double ramp = 0.2) {
    brake(t_on, 0.0);
    brake(t_on + ramp, level);
    brake(t_off, level);
    brake(t_off + ramp, 0.0);
  }

  ManeuverScript take() {
    auto s = std::move(script_);
    s.validate();
    return s;
  }

 private:
  void push(std::vector<ProfileKnot>& knots, double t, double value) {
    if (t > script_.duration) return;
    if (!knots.empty() && t < knots.back().t) t = knots.back().t;
    knots.push_back({t, value});
  }

  ManeuverScript script_;
};

// Cycles sweep their level range deterministically so every maneuver covers
// the whole span; the rng adds small per-cycle jitter on top.
double cycle_level(int cycle, double lo, double hi, Rng& rng) {
  static constexpr double kSpread[5] = {0.5, 0.95, 0.1, 0.75, 0.3};
  const double base = lo + (hi - lo) * kSpread[cycle % 5];
  return base + (hi - lo) * rng.uniform(-0.05, 0.05);
}

ManeuverScript make_standstill_tipin(const std::string& name, double duration, double level,
                                     Rng& rng) {
  ScriptBuilder b(name, duration);
  const double cycle = 24.0;
  int c = 0;
  for (double t0 = 0.0; t0 < duration; t0 += cycle, ++c) {
    b.brake(t0, 500.0);
    b.brake(t0 + 6.0, 500.0);
    b.brake(t0 + 6.3, 0.0);
    b.drive_pulse(t0 + 6.5, t0 + 9.5, cycle_level(c, 0.85 * level, 1.15 * level, rng));
    b.brake_pulse(t0 + 14.0, t0 + 18.5, cycle_level(c + 1, 680.0, 920.0, rng));
    b.brake(t0 + 19.0, 500.0);
  }
  return b.take();
}

ManeuverScript make_tipin_tipout(const std::string& name, double duration, Rng& rng) {
  ScriptBuilder b(name, duration);
  const double cycle = 30.0;
  int c = 0;
  for (double t0 = 0.0; t0 < duration; t0 += cycle, ++c) {
    b.brake(t0, 400.0);
    b.brake(t0 + 2.0, 400.0);
    b.brake(t0 + 2.3, 0.0);
    // Oscillating load: repeated tip-in / tip-out transitions.
    for (int p = 0; p < 3; ++p) {
      const double tp = t0 + 2.5 + 4.5 * p;
      b.drive_pulse(tp, tp + 2.4, cycle_level(c + p, 85.0, 135.0, rng), 0.2);
    }
    b.brake_pulse(t0 + 17.0, t0 + 24.0, cycle_level(c + 2, 550.0, 850.0, rng));
    b.brake(t0 + 24.5, 400.0);
  }
  return b.take();
}

ManeuverScript make_emergency_brake(const std::string& name, double duration, double accel_time,
                                    Rng& rng) {
  ScriptBuilder b(name, duration);
  const double cycle = accel_time + 16.0;
  int c = 0;
  for (double t0 = 0.0; t0 < duration; t0 += cycle, ++c) {
    b.drive_pulse(t0 + 0.5, t0 + 0.5 + accel_time, cycle_level(c, 230.0, 290.0, rng));
    b.brake_pulse(t0 + accel_time + 1.5, t0 + accel_time + 11.0,
                  cycle_level(c + 1, 1900.0, 2600.0, rng), 0.15);
    b.brake(t0 + accel_time + 11.5, 500.0);
  }
  return b.take();
}

ManeuverScript make_curb_impacts(const std::string& name, double duration, Rng& rng) {
  ScriptBuilder b(name, duration);
  const double cycle = 20.0;
  for (double t0 = 0.0; t0 < duration; t0 += cycle) {
    const double scale = rng.uniform(0.8, 1.25);
    b.drive_pulse(t0 + 0.5, t0 + 4.0, 45.0 * scale);
    b.drive(t0 + 4.5, 18.0);
    b.drive(t0 + 13.0, 18.0);
    b.drive(t0 + 13.3, 0.0);
    b.impulse(t0 + 6.0, -40.0 * scale);
    b.impulse(t0 + 8.5, -55.0 * scale);
    b.impulse(t0 + 10.5, 30.0 * scale);
    b.impulse(t0 + 12.0, -45.0 * scale);
    b.brake_pulse(t0 + 13.5, t0 + 16.5, 400.0);
    b.brake(t0 + 17.0, 400.0);
  }
  return b.take();
}

ManeuverScript make_cornering(const std::string& name, double duration, Rng& rng) {
  ScriptBuilder b(name, duration);
  const double cycle = 40.0;
  int c = 0;
  for (double t0 = 0.0; t0 < duration; t0 += cycle, ++c) {
    const double yaw_peak = cycle_level(c + 1, 0.25, 0.45, rng);
    b.drive_pulse(t0 + 0.5, t0 + 4.0, cycle_level(c, 220.0, 280.0, rng));
    b.drive(t0 + 4.5, 40.0);
    b.drive(t0 + 30.0, 40.0);
    b.drive(t0 + 30.3, 0.0);
    b.yaw(t0 + 6.0, 0.0);
    b.yaw(t0 + 8.0, yaw_peak);
    b.yaw(t0 + 15.0, yaw_peak);
    b.yaw(t0 + 17.0, 0.0);
    b.yaw(t0 + 20.0, -yaw_peak);
    b.yaw(t0 + 28.0, -yaw_peak);
    b.yaw(t0 + 30.0, 0.0);
    b.brake_pulse(t0 + 31.0, t0 + 36.5, 900.0);
    b.brake(t0 + 37.0, 450.0);
  }
  return b.take();
}

ManeuverScript make_gravel_run(const std::string& name, double duration, Rng& rng) {
  ScriptBuilder b(name, duration);
  b.noise(rng.uniform(350.0, 550.0));
  const double cycle = 30.0;
  int c = 0;
  for (double t0 = 0.0; t0 < duration; t0 += cycle, ++c) {
    b.drive_pulse(t0 + 0.5, t0 + 4.5, cycle_level(c, 140.0, 185.0, rng));
    b.drive(t0 + 5.0, 55.0);
    b.drive(t0 + 20.0, 55.0);
    b.drive(t0 + 20.3, 0.0);
    b.brake_pulse(t0 + 21.0, t0 + 26.5, 800.0);
    b.brake(t0 + 27.0, 450.0);
  }
  return b.take();
}

ManeuverScript make_stopgo_crawl(const std::string& name, double duration, double noise_std,
                                 Rng& rng) {
  ScriptBuilder b(name, duration);
  b.noise(noise_std);
  const double cycle = 8.0;
  int c = 0;
  for (double t0 = 0.0; t0 < duration; t0 += cycle, ++c) {
    b.drive_pulse(t0 + 0.3, t0 + 1.4, cycle_level(c, 23.0, 29.0, rng), 0.15);
    b.brake_pulse(t0 + 3.4, t0 + 5.2, 250.0, 0.15);
    b.brake(t0 + 5.5, 350.0);
    b.brake(t0 + 7.8, 350.0);
    b.brake(t0 + 7.95, 0.0);
  }
  return b.take();
}

ManeuverScript make_urban_mixed(const std::string& name, double duration, Rng& rng) {
  ScriptBuilder b(name, duration);
  const double cycle = 36.0;
  int c = 0;
  for (double t0 = 0.0; t0 < duration; t0 += cycle, ++c) {
    b.drive_pulse(t0 + 0.5, t0 + 3.5, cycle_level(c, 100.0, 140.0, rng));
    b.drive(t0 + 4.0, 30.0);
    b.drive(t0 + 9.0, 30.0);
    b.drive_pulse(t0 + 9.5, t0 + 12.0, cycle_level(c + 2, 150.0, 210.0, rng));
    b.drive(t0 + 12.5, 35.0);
    b.drive(t0 + 22.0, 35.0);
    b.drive(t0 + 22.3, 0.0);
    const double wiggle = cycle_level(c + 3, 0.1, 0.2, rng);
    b.yaw(t0 + 13.0, 0.0);
    b.yaw(t0 + 14.5, wiggle);
    b.yaw(t0 + 18.0, -wiggle);
    b.yaw(t0 + 20.0, 0.0);
    b.brake_pulse(t0 + 8.0, t0 + 9.2, 300.0);
    b.brake_pulse(t0 + 23.0, t0 + 30.0, cycle_level(c + 1, 500.0, 800.0, rng));
    b.brake(t0 + 30.5, 450.0);
  }
  return b.take();
}

ManeuverScript make_coast_down(const std::string& name, double duration, Rng& rng) {
  ScriptBuilder b(name, duration);
  const double cycle = 34.0;
  int c = 0;
  for (double t0 = 0.0; t0 < duration; t0 += cycle, ++c) {
    b.drive_pulse(t0 + 0.5, t0 + 6.5, cycle_level(c, 260.0, 340.0, rng));
    b.brake_pulse(t0 + 26.0, t0 + 31.0, 700.0);
    b.brake(t0 + 31.5, 450.0);
  }
  return b.take();
}

}  // namespace

std::vector<ManeuverScript> standard_scenario_suite(std::uint64_t seed, double total_duration_s,
                                                    std::size_t variants_per_type) {
  require(total_duration_s > 0.0, "invalid-script", "total duration must be positive");
  require(variants_per_type >= 1, "invalid-script", "variants_per_type must be >= 1");
  Rng rng(mix_seed(seed, 0xc0de));

  constexpr int kTypeCount = 14;
  const double share =
      total_duration_s / static_cast<double>(kTypeCount * variants_per_type);

  // Variants of each scenario class land in different dataset splits, so
  // every split sees every condition class without sharing a maneuver.
  std::vector<ManeuverScript> suite;
  for (std::size_t v = 0; v < variants_per_type; ++v) {
    const std::string tag = "_" + std::to_string(v);
    suite.push_back(make_standstill_tipin("standstill_tipin_low" + tag, share, 40.0, rng));
    suite.push_back(make_standstill_tipin("standstill_tipin_mid" + tag, share, 85.0, rng));
    suite.push_back(make_standstill_tipin("standstill_tipin_high" + tag, share, 170.0, rng));
    suite.push_back(make_tipin_tipout("tipin_tipout_cycles" + tag, share, rng));
    suite.push_back(make_emergency_brake("emergency_brake_low" + tag, share, 2.5, rng));
    suite.push_back(make_emergency_brake("emergency_brake_mid" + tag, share, 4.5, rng));
    suite.push_back(make_emergency_brake("emergency_brake_high" + tag, share, 7.5, rng));
    suite.push_back(make_curb_impacts("curb_impacts" + tag, share, rng));
    suite.push_back(make_cornering("cornering_constant_radius" + tag, share, rng));
    suite.push_back(make_gravel_run("gravel_run" + tag, share, rng));
    suite.push_back(make_stopgo_crawl("stopgo_crawl" + tag, share, 0.0, rng));
    suite.push_back(make_stopgo_crawl("gravel_crawl" + tag, share, 120.0, rng));
    suite.push_back(make_urban_mixed("urban_mixed" + tag, share, rng));
    suite.push_back(make_coast_down("coast_down" + tag, share, rng));
  }
  return suite;
}

}  // namespace vws
