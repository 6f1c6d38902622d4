#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "vws/pso.hpp"
#include "vws/signal.hpp"

namespace vws {

struct FilterCoeffs {
  std::vector<double> b;  // feedforward
  std::vector<double> a;  // feedback, a[0] == 1
  std::vector<std::complex<double>> poles;  // digital poles, all inside the unit circle
};

// Low-pass Butterworth via the analog prototype (poles on the left-half
// circle of radius omega_a) and the bilinear transform with pre-warping
// omega_a = 2 fs tan(pi fc / fs). DC gain is normalized to exactly 1, so
// the magnitude at the cutoff is 1/sqrt(2) by construction.
FilterCoeffs butterworth_design(int order, double cutoff_hz, double sample_rate_hz);

// Direct-form IIR with zero initial state; strictly causal.
std::vector<double> filter_causal(std::span<const double> signal, const FilterCoeffs& coeffs);

// Forward-backward filtering after odd-reflection padding of length
// 3 * max(len(a), len(b)) at both ends, then an integer shift (positive =
// advance toward future samples, edges replicated).
std::vector<double> filter_zero_phase(std::span<const double> signal, const FilterCoeffs& coeffs,
                                      int shift = 0);

struct FilterSpec {
  int order = 1;
  double cutoff_hz = 1.0;
  int shift = 0;       // acausal variant only
  bool acausal = false;
};

struct FilterSearchRanges {
  int order_min = 1;
  int order_max = 8;
  double cutoff_min_hz = 0.5;
  double cutoff_max_hz = 24.0;
  int shift_min = -10;
  int shift_max = 10;
};

struct PsoBudget {
  std::size_t particles = 30;
  std::size_t iterations = 100;
  std::uint64_t seed = 0;
};

struct FilterTuneResult {
  FilterSpec spec;
  double mae = 0.0;  // m/s, achieved on the objective frame
};

enum class FilterVariant { kCausal, kAcausal };

// Apply a tuned spec to one signal segment (rad/s in, rad/s out).
std::vector<double> apply_filter_spec(const FilterSpec& spec, std::span<const double> signal,
                                      double sample_rate_hz);

// Motor-speed channel filtered per maneuver, converted to wheel-equivalent
// translational speed, scored by MAE against the mean of the two reference
// wheel speeds with the first `washout` samples of each maneuver excluded
// (the same warm-up rule the evaluation applies). PSO over (order, cutoff)
// or (order, cutoff, shift).
FilterTuneResult tune_filter(const SignalFrame& frame, FilterVariant variant, double tire_radius,
                             double gear_ratio, const FilterSearchRanges& ranges,
                             const PsoBudget& pso, std::size_t washout = 0);

// Filtered motor-speed prediction for a whole frame, per segment, in m/s
// at the tire-road interface.
std::vector<double> filtered_motor_prediction(const SignalFrame& frame, const FilterSpec& spec,
                                              double tire_radius, double gear_ratio);

}  // namespace vws
