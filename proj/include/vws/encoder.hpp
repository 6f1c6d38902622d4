#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vws/signal.hpp"

namespace vws {

enum class EncoderMode { kFrequencyCount, kPeriodMeasure };

// Incremental encoder emulation. Frequency-count mode counts ticks in a
// trailing window; period mode reciprocates the spacing of the last two
// ticks and holds between ticks. Either way the reading drops to exactly 0
// once no tick arrives within min_speed_timeout.
struct EncoderConfig {
  int ticks_per_rev = 43;
  EncoderMode mode = EncoderMode::kFrequencyCount;
  double window = 0.1;             // s, frequency mode
  double min_speed_timeout = 0.5;  // s
  double quantize_output = 0.0;    // rad/s step; 0 disables

  void validate() const;

  double tick_angle() const;  // rad per tick
};

// Vehicle displacement represented by one tick: 2*pi*r / ticks_per_rev.
double tick_displacement(const EncoderConfig& cfg, double radius);

// Emulate one wheel-speed channel. true_speed is sampled at `rate` Hz and
// held constant between samples when integrating the wheel angle. The seed
// perturbs the initial tick phase.
std::vector<double> encode_wheel_speed(std::span<const double> true_speed, double rate,
                                       const EncoderConfig& cfg, std::uint64_t seed);

// Motor speed pickup: the true signal plus seeded white Gaussian noise.
// Torsion distortion is physical (it comes from the drivetrain model).
std::vector<double> sense_motor_speed(std::span<const double> true_motor_speed, double noise_std,
                                      std::uint64_t seed);

// Produce the full dataset frame from a ground-truth frame: SP and
// reference wheel-speed channels per wheel, noisy motor speed, torques
// passed through. Encoders restart at maneuver boundaries.
SignalFrame degrade_frame(const SignalFrame& truth, const EncoderConfig& sp_cfg,
                          const EncoderConfig& ref_cfg, double motor_noise_std,
                          std::uint64_t seed);

}  // namespace vws
