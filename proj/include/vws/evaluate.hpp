#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vws/signal.hpp"

namespace vws {

// Per-method MAE summary against the reference wheel speeds, everything in
// m/s at the tire-road interface.
struct MethodResult {
  std::string method;
  std::vector<std::pair<std::string, double>> per_segment;      // (maneuver, MAE)
  double overall_mae = 0.0;                                     // sample-weighted
  std::array<double, 6> summary = {0, 0, 0, 0, 0, 0};           // q0,q25,q50,q75,q100,mean
  bool present = true;
};

// Two-channel predictions score the mean of the per-wheel MAEs; a single
// channel scores against the mean of the two reference channels. The first
// `washout` samples of each segment are excluded: estimators are allowed a
// warm-up from their reset state, uniformly for every method.
MethodResult evaluate_method(const std::string& name,
                             const std::vector<std::vector<double>>& prediction_mps,
                             const std::vector<std::vector<double>>& reference_mps,
                             const std::vector<Segment>& segments, std::size_t washout = 0);

// Reference channels of a dataset frame converted to m/s.
std::vector<std::vector<double>> reference_speeds_mps(const SignalFrame& frame,
                                                      double tire_radius);

// Quantiles by sorted linear interpolation at (n-1) * q.
double quantile(std::vector<double> values, double q);

struct RankingRow {
  MethodResult result;
  double reduction_vs_sp = 0.0;       // (mae_sp - mae) / mae_sp
  double reduction_vs_causal = 0.0;
  double reduction_vs_acausal = 0.0;  // vs best acausal variant
};

// Ranking plus relative reductions against the SP signal, the causal LPF,
// and the best acausal LPF. Methods may be absent (row kept, flagged).
std::vector<RankingRow> build_ranking(const std::vector<MethodResult>& methods);

void write_ranking_csv(const std::vector<RankingRow>& rows, const std::string& path,
                       const std::vector<std::string>& comments = {});
void write_error_distribution_csv(const std::vector<MethodResult>& methods,
                                  const std::string& path,
                                  const std::vector<std::string>& comments = {});

// Plot-ready time series for one maneuver: t, v_SP, v_EM, v_LPF_acausal,
// v_GRU, v_ref (single traces; two-channel signals averaged).
struct TimeSeriesExport {
  std::vector<double> t, v_sp, v_em, v_lpf_acausal, v_gru, v_ref;
};
void write_timeseries_csv(const TimeSeriesExport& series, const std::string& path,
                          const std::vector<std::string>& comments = {});

// Standstill stretches: runs of at least min_run consecutive samples where
// the reference reads exactly zero (reference-as-ground-truth convention),
// segment warm-ups excluded. The run-length floor keeps isolated
// low-speed-timeout flickers during crawling out of the mask.
std::vector<bool> standstill_mask(const std::vector<std::vector<double>>& reference_mps,
                                  const std::vector<Segment>& segments, std::size_t washout = 0,
                                  std::size_t min_run = 50);

// Mean absolute prediction value over masked samples.
double mean_abs_over_mask(const std::vector<std::vector<double>>& prediction_mps,
                          const std::vector<bool>& mask);

}  // namespace vws
