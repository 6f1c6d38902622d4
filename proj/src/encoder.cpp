#include "vws/encoder.hpp"

#include <cmath>
#include <limits>

#include "vws/error.hpp"
#include "vws/rng.hpp"

namespace vws {

void EncoderConfig::validate() const {
  require(ticks_per_rev >= 1, "invalid-encoder", "ticks_per_rev must be >= 1");
  require(window > 0.0, "invalid-encoder", "window must be positive");
  require(min_speed_timeout > 0.0, "invalid-encoder", "min_speed_timeout must be positive");
  require(quantize_output >= 0.0, "invalid-encoder", "quantize_output must be >= 0");
}

double EncoderConfig::tick_angle() const { return kTwoPi / static_cast<double>(ticks_per_rev); }

double tick_displacement(const EncoderConfig& cfg, double radius) {
  require(radius > 0.0, "invalid-geometry");
  return radius * cfg.tick_angle();
}

std::vector<double> encode_wheel_speed(std::span<const double> true_speed, double rate,
                                       const EncoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  require(rate > 0.0, "invalid-rate");
  const std::size_t n = true_speed.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;

  const double dt = 1.0 / rate;
  const double delta = cfg.tick_angle();
  Rng rng(mix_seed(seed, 0x7e11));
  const double phase = rng.uniform(0.0, delta);

  // Trailing-window length in whole output samples (window is quantized to
  // the sample grid; the default 0.1 s at 50 Hz is exact).
  const auto window_samples = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.window * rate)));
  const double window_eff = static_cast<double>(window_samples) * dt;
  const double count_unit = delta / window_eff;  // rad/s per tick in window

  std::vector<std::int64_t> cum(n + 1, 0);  // cumulative tick count at sample boundaries
  double theta = 0.0;
  double t_last_tick = -std::numeric_limits<double>::infinity();
  double t_prev_tick = -std::numeric_limits<double>::infinity();
  double period_reading = 0.0;

  const auto level = [&](double th) {
    return static_cast<std::int64_t>(std::floor((th - phase) / delta));
  };

  for (std::size_t k = 0; k < n; ++k) {
    const double t_k = static_cast<double>(k) * dt;

    // Integrate the wheel angle through [t_k, t_k + dt) at the held speed.
    const double omega = true_speed[k];
    const double theta_next = theta + omega * dt;
    const std::int64_t c0 = level(theta);
    const std::int64_t c1 = level(theta_next);
    const std::int64_t crossings = std::llabs(c1 - c0);
    cum[k + 1] = cum[k] + crossings;

    if (crossings > 0) {
      // Times of the last (and next-to-last) level crossings in the
      // interval; the held speed makes them uniformly spaced.
      const double last_level =
          omega > 0.0 ? phase + static_cast<double>(c1) * delta
                      : phase + static_cast<double>(c1 + 1) * delta;
      const double t_cross_last = t_k + (last_level - theta) / omega;
      const double spacing = delta / std::abs(omega);
      if (crossings >= 2) {
        t_prev_tick = t_cross_last - spacing;
        t_last_tick = t_cross_last;
      } else {
        t_prev_tick = t_last_tick;
        t_last_tick = t_cross_last;
      }
      if (std::isfinite(t_prev_tick) && t_last_tick > t_prev_tick)
        period_reading = delta / (t_last_tick - t_prev_tick);
    }
    theta = theta_next;

    // Reading at t_k, latched from the tick interval straddling the sample
    // instant (sub-tick age at speed, held value at crawl).
    double reading = 0.0;
    if (t_k - t_last_tick <= cfg.min_speed_timeout) {
      if (cfg.mode == EncoderMode::kFrequencyCount) {
        const std::int64_t earlier = k + 1 >= window_samples ? cum[k + 1 - window_samples] : 0;
        reading = static_cast<double>(cum[k + 1] - earlier) * count_unit;
      } else {
        reading = period_reading;
      }
    }
    if (cfg.quantize_output > 0.0)
      reading = std::round(reading / cfg.quantize_output) * cfg.quantize_output;
    out[k] = reading;
  }
  return out;
}

std::vector<double> sense_motor_speed(std::span<const double> true_motor_speed, double noise_std,
                                      std::uint64_t seed) {
  require(noise_std >= 0.0, "invalid-noise", "noise_std must be >= 0");
  std::vector<double> out(true_motor_speed.begin(), true_motor_speed.end());
  if (noise_std > 0.0) {
    Rng rng(mix_seed(seed, 0x40153));
    for (double& v : out) v += rng.gaussian(noise_std);
  }
  return out;
}

SignalFrame degrade_frame(const SignalFrame& truth, const EncoderConfig& sp_cfg,
                          const EncoderConfig& ref_cfg, double motor_noise_std,
                          std::uint64_t seed) {
  truth.validate();
  const auto& wl = truth.channel(channels::kWheelLeftTrue);
  const auto& wr = truth.channel(channels::kWheelRightTrue);
  const auto& motor = truth.channel(channels::kMotorTrue);
  const auto& drive = truth.channel(channels::kDriveTorque);
  const auto& brake = truth.channel(channels::kBrakeTorque);

  const std::size_t n = truth.length();
  std::vector<double> sp_l(n), sp_r(n), ref_l(n), ref_r(n), em(n);

  // Sensors restart per maneuver so maneuvers stay independent.
  for (std::size_t s = 0; s < truth.segments.size(); ++s) {
    const auto& seg = truth.segments[s];
    const auto slice = [&](const std::vector<double>& c) {
      return std::span<const double>(c.data() + seg.begin, seg.size());
    };
    const auto place = [&](std::vector<double>& dst, const std::vector<double>& src) {
      std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(seg.begin));
    };
    const std::uint64_t base = mix_seed(seed, 16 * s);
    place(sp_l, encode_wheel_speed(slice(wl), truth.sample_rate, sp_cfg, mix_seed(base, 1)));
    place(sp_r, encode_wheel_speed(slice(wr), truth.sample_rate, sp_cfg, mix_seed(base, 2)));
    place(ref_l, encode_wheel_speed(slice(wl), truth.sample_rate, ref_cfg, mix_seed(base, 3)));
    place(ref_r, encode_wheel_speed(slice(wr), truth.sample_rate, ref_cfg, mix_seed(base, 4)));
    place(em, sense_motor_speed(slice(motor), motor_noise_std, mix_seed(base, 5)));
  }

  SignalFrame out;
  out.sample_rate = truth.sample_rate;
  out.t0 = truth.t0;
  out.add_channel(channels::kWheelLeftSp, std::move(sp_l));
  out.add_channel(channels::kWheelRightSp, std::move(sp_r));
  out.add_channel(channels::kMotorSp, std::move(em));
  out.add_channel(channels::kDriveTorque, drive);
  out.add_channel(channels::kBrakeTorque, brake);
  out.add_channel(channels::kWheelLeftRef, std::move(ref_l));
  out.add_channel(channels::kWheelRightRef, std::move(ref_r));
  out.segments = truth.segments;
  return out;
}

}  // namespace vws
