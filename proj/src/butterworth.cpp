#include "vws/butterworth.hpp"

#include <algorithm>
#include <cmath>

#include "vws/error.hpp"

namespace vws {

FilterCoeffs butterworth_design(int order, double cutoff_hz, double sample_rate_hz) {
  require(order >= 1 && order <= 8, "unsupported-order",
          "order " + std::to_string(order) + " outside [1, 8]");
  require(sample_rate_hz > 0.0, "invalid-rate");
  require(cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0, "cutoff-above-nyquist",
          std::to_string(cutoff_hz) + " Hz at fs " + std::to_string(sample_rate_hz));

  using cld = std::complex<long double>;
  const long double fs = sample_rate_hz;
  const long double warped = 2.0L * fs * std::tan(static_cast<long double>(M_PI) * cutoff_hz / fs);

  // Analog prototype poles s_k = omega_a * exp(j pi (2k + n - 1) / (2n)),
  // bilinear-transformed to z via p = (2 fs + s) / (2 fs - s).
  std::vector<cld> zpoles(static_cast<std::size_t>(order));
  for (int k = 1; k <= order; ++k) {
    const long double angle =
        static_cast<long double>(M_PI) * (2.0L * k + order - 1.0L) / (2.0L * order);
    const cld s = warped * cld(std::cos(angle), std::sin(angle));
    zpoles[static_cast<std::size_t>(k - 1)] = (2.0L * fs + s) / (2.0L * fs - s);
  }

  // a(z) = prod (1 - p z^-1), expanded in long double.
  std::vector<cld> acc = {cld(1.0L, 0.0L)};
  for (const auto& p : zpoles) {
    std::vector<cld> next(acc.size() + 1, cld(0.0L, 0.0L));
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i] += acc[i];
      next[i + 1] -= acc[i] * p;
    }
    acc = std::move(next);
  }

  FilterCoeffs out;
  out.a.resize(acc.size());
  long double a_sum = 0.0L;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out.a[i] = static_cast<double>(acc[i].real());
    a_sum += acc[i].real();
  }

  // b(z) = g (1 + z^-1)^n with g chosen for unit DC gain.
  std::vector<long double> binom = {1.0L};
  for (int i = 0; i < order; ++i) {
    std::vector<long double> next(binom.size() + 1, 0.0L);
    for (std::size_t j = 0; j < binom.size(); ++j) {
      next[j] += binom[j];
      next[j + 1] += binom[j];
    }
    binom = std::move(next);
  }
  const long double gain = a_sum / std::pow(2.0L, order);
  out.b.resize(binom.size());
  for (std::size_t i = 0; i < binom.size(); ++i) out.b[i] = static_cast<double>(gain * binom[i]);

  out.poles.reserve(zpoles.size());
  for (const auto& p : zpoles) {
    out.poles.emplace_back(static_cast<double>(p.real()), static_cast<double>(p.imag()));
    require(std::abs(out.poles.back()) < 1.0, "unstable-design");
  }
  return out;
}

std::vector<double> filter_causal(std::span<const double> signal, const FilterCoeffs& coeffs) {
  const std::size_t nb = coeffs.b.size();
  const std::size_t na = coeffs.a.size();
  const std::size_t order = std::max(nb, na) - 1;
  std::vector<double> state(order, 0.0);
  std::vector<double> out(signal.size());

  // Direct form II transposed.
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double x = signal[i];
    const double y = coeffs.b[0] * x + (order > 0 ? state[0] : 0.0);
    for (std::size_t j = 0; j + 1 < order; ++j) {
      state[j] = (j + 1 < nb ? coeffs.b[j + 1] * x : 0.0) + state[j + 1] -
                 (j + 1 < na ? coeffs.a[j + 1] * y : 0.0);
    }
    if (order > 0) {
      state[order - 1] = (order < nb ? coeffs.b[order] * x : 0.0) -
                         (order < na ? coeffs.a[order] * y : 0.0);
    }
    out[i] = y;
  }
  return out;
}

namespace {

// Causal pass with the state primed to the steady-state response of a
// constant input equal to the first sample, so padded forward-backward
// runs carry no startup transient (constants map to themselves exactly).
std::vector<double> filter_primed(std::span<const double> signal, const FilterCoeffs& coeffs) {
  const std::size_t nb = coeffs.b.size();
  const std::size_t na = coeffs.a.size();
  const std::size_t order = std::max(nb, na) - 1;

  // Steady state of the transposed direct form II for constant input u and
  // unit DC gain: state[j] = u * sum_{k > j} (b_k - a_k).
  std::vector<double> state(order, 0.0);
  const double u = signal.empty() ? 0.0 : signal.front();
  double tail = 0.0;
  for (std::size_t j = order; j-- > 0;) {
    const double bk = j + 1 < nb ? coeffs.b[j + 1] : 0.0;
    const double ak = j + 1 < na ? coeffs.a[j + 1] : 0.0;
    tail += bk - ak;
    state[j] = u * tail;
  }

  std::vector<double> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double x = signal[i];
    const double y = coeffs.b[0] * x + (order > 0 ? state[0] : 0.0);
    for (std::size_t j = 0; j + 1 < order; ++j) {
      state[j] = (j + 1 < nb ? coeffs.b[j + 1] * x : 0.0) + state[j + 1] -
                 (j + 1 < na ? coeffs.a[j + 1] * y : 0.0);
    }
    if (order > 0) {
      state[order - 1] =
          (order < nb ? coeffs.b[order] * x : 0.0) - (order < na ? coeffs.a[order] * y : 0.0);
    }
    out[i] = y;
  }
  return out;
}

}  // namespace

std::vector<double> filter_zero_phase(std::span<const double> signal, const FilterCoeffs& coeffs,
                                      int shift) {
  const std::size_t pad = 3 * std::max(coeffs.a.size(), coeffs.b.size());
  const std::size_t n = signal.size();
  require(n > pad, "signal-too-short",
          "need more than " + std::to_string(pad) + " samples, got " + std::to_string(n));

  // Odd (anti-symmetric) extension about both endpoints.
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * signal[0] - signal[pad - i]);
  ext.insert(ext.end(), signal.begin(), signal.end());
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * signal[n - 1] - signal[n - 2 - i]);

  std::vector<double> fwd = filter_primed(ext, coeffs);
  std::reverse(fwd.begin(), fwd.end());
  std::vector<double> bwd = filter_primed(fwd, coeffs);
  std::reverse(bwd.begin(), bwd.end());

  std::vector<double> out(n);
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(i + shift, 0, last);
    out[static_cast<std::size_t>(i)] = bwd[static_cast<std::size_t>(j) + pad];
  }
  return out;
}

std::vector<double> apply_filter_spec(const FilterSpec& spec, std::span<const double> signal,
                                      double sample_rate_hz) {
  const FilterCoeffs coeffs = butterworth_design(spec.order, spec.cutoff_hz, sample_rate_hz);
  return spec.acausal ? filter_zero_phase(signal, coeffs, spec.shift)
                      : filter_causal(signal, coeffs);
}

std::vector<double> filtered_motor_prediction(const SignalFrame& frame, const FilterSpec& spec,
                                              double tire_radius, double gear_ratio) {
  const auto& motor = frame.channel(channels::kMotorSp);
  std::vector<double> prediction(frame.length());
  for (const auto& seg : frame.segments) {
    const std::span<const double> slice(motor.data() + seg.begin, seg.size());
    const std::vector<double> filtered = apply_filter_spec(spec, slice, frame.sample_rate);
    const std::vector<double> v = rot_to_translational(filtered, tire_radius, gear_ratio);
    std::copy(v.begin(), v.end(), prediction.begin() + static_cast<std::ptrdiff_t>(seg.begin));
  }
  return prediction;
}

namespace {

double prediction_mae_vs_ref_mean(const SignalFrame& frame, const std::vector<double>& prediction,
                                  double tire_radius, std::size_t washout) {
  const auto& ref_l = frame.channel(channels::kWheelLeftRef);
  const auto& ref_r = frame.channel(channels::kWheelRightRef);
  double acc = 0.0;
  std::size_t count = 0;
  for (const auto& seg : frame.segments) {
    for (std::size_t i = seg.begin + std::min(washout, seg.size()); i < seg.end; ++i) {
      const double ref = 0.5 * (ref_l[i] + ref_r[i]) * tire_radius;
      acc += std::abs(prediction[i] - ref);
      ++count;
    }
  }
  require(count > 0, "empty-input", "washout swallowed every sample");
  return acc / static_cast<double>(count);
}

}  // namespace

FilterTuneResult tune_filter(const SignalFrame& frame, FilterVariant variant, double tire_radius,
                             double gear_ratio, const FilterSearchRanges& ranges,
                             const PsoBudget& pso, std::size_t washout) {
  frame.validate();
  require(frame.length() > 0, "empty-input");

  const bool acausal = variant == FilterVariant::kAcausal;
  SearchSpace space;
  space.dims.push_back({"order", static_cast<double>(ranges.order_min),
                        static_cast<double>(ranges.order_max), true});
  space.dims.push_back({"cutoff_hz", ranges.cutoff_min_hz, ranges.cutoff_max_hz, false});
  if (acausal)
    space.dims.push_back({"shift", static_cast<double>(ranges.shift_min),
                          static_cast<double>(ranges.shift_max), true});

  const Objective objective = [&](std::span<const double> point) -> double {
    FilterSpec spec;
    spec.order = static_cast<int>(std::llround(point[0]));
    spec.cutoff_hz = point[1];
    spec.acausal = acausal;
    spec.shift = acausal ? static_cast<int>(std::llround(point[2])) : 0;
    try {
      const auto prediction = filtered_motor_prediction(frame, spec, tire_radius, gear_ratio);
      return prediction_mae_vs_ref_mean(frame, prediction, tire_radius, washout);
    } catch (const Error&) {
      // Infeasible particle (design or length violation): penalized, not fatal.
      return kPsoPenaltyCost;
    }
  };

  const PsoResult best = pso_minimize(objective, space, pso.particles, pso.iterations, pso.seed);
  FilterTuneResult result;
  result.spec.order = static_cast<int>(std::llround(best.best_point[0]));
  result.spec.cutoff_hz = best.best_point[1];
  result.spec.acausal = acausal;
  result.spec.shift = acausal ? static_cast<int>(std::llround(best.best_point[2])) : 0;
  result.mae = best.best_cost;
  return result;
}

}  // namespace vws
