#include "vws/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "vws/error.hpp"

namespace vws {

namespace {

constexpr double kSpeedSanityLimit = 100.0;  // m/s

void check_units(const std::vector<std::vector<double>>& channels) {
  for (const auto& ch : channels)
    for (const double v : ch)
      require(std::abs(v) <= kSpeedSanityLimit, "unit-sanity",
              "speed above 100 m/s; expected m/s at the tire-road interface");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_csv(const std::string& path, const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "io-error", "cannot open for writing: " + path);
  for (const auto& line : comments) out << "# " << line << "\n";
  return out;
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), "empty-input", "quantile of nothing");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - w) + values[hi] * w;
}

std::vector<std::vector<double>> reference_speeds_mps(const SignalFrame& frame,
                                                      double tire_radius) {
  return {rot_to_translational(frame.channel(channels::kWheelLeftRef), tire_radius),
          rot_to_translational(frame.channel(channels::kWheelRightRef), tire_radius)};
}

MethodResult evaluate_method(const std::string& name,
                             const std::vector<std::vector<double>>& prediction_mps,
                             const std::vector<std::vector<double>>& reference_mps,
                             const std::vector<Segment>& segments, std::size_t washout) {
  require(prediction_mps.size() == 1 || prediction_mps.size() == 2, "bad-prediction-shape",
          name + ": got " + std::to_string(prediction_mps.size()) + " channels");
  require(reference_mps.size() == 2, "bad-prediction-shape", "reference must have 2 channels");
  const std::size_t n = reference_mps[0].size();
  for (const auto& ch : prediction_mps)
    require(ch.size() == n, "bad-prediction-shape", name + ": length mismatch");
  require(reference_mps[1].size() == n, "bad-prediction-shape", "reference length mismatch");
  require(!segments.empty() && segments.back().end == n, "bad-prediction-shape",
          "segments do not cover the signals");
  check_units(prediction_mps);
  check_units(reference_mps);

  const bool two_channel = prediction_mps.size() == 2;
  MethodResult result;
  result.method = name;

  double total_abs = 0.0;
  std::size_t total_count = 0;
  for (const auto& seg : segments) {
    require(seg.size() > washout, "bad-prediction-shape",
            seg.maneuver_id + " shorter than the evaluation washout");
    double seg_abs = 0.0;
    for (std::size_t i = seg.begin + washout; i < seg.end; ++i) {
      double err;
      if (two_channel) {
        // mean of per-wheel absolute errors
        err = 0.5 * (std::abs(prediction_mps[0][i] - reference_mps[0][i]) +
                     std::abs(prediction_mps[1][i] - reference_mps[1][i]));
      } else {
        const double ref_mean = 0.5 * (reference_mps[0][i] + reference_mps[1][i]);
        err = std::abs(prediction_mps[0][i] - ref_mean);
      }
      seg_abs += err;
    }
    total_abs += seg_abs;
    total_count += seg.size() - washout;
    result.per_segment.emplace_back(seg.maneuver_id,
                                    seg_abs / static_cast<double>(seg.size() - washout));
  }
  result.overall_mae = total_abs / static_cast<double>(total_count);

  std::vector<double> seg_maes;
  seg_maes.reserve(result.per_segment.size());
  for (const auto& [_, mae] : result.per_segment) seg_maes.push_back(mae);
  result.summary[0] = quantile(seg_maes, 0.0);
  result.summary[1] = quantile(seg_maes, 0.25);
  result.summary[2] = quantile(seg_maes, 0.5);
  result.summary[3] = quantile(seg_maes, 0.75);
  result.summary[4] = quantile(seg_maes, 1.0);
  double mean = 0.0;
  for (const double m : seg_maes) mean += m;
  result.summary[5] = mean / static_cast<double>(seg_maes.size());
  return result;
}

std::vector<RankingRow> build_ranking(const std::vector<MethodResult>& methods) {
  const auto find_mae = [&](const std::string& name) -> std::optional<double> {
    for (const auto& m : methods)
      if (m.method == name && m.present) return m.overall_mae;
    return std::nullopt;
  };
  const std::optional<double> sp = find_mae("SP");
  const std::optional<double> causal = find_mae("LPF_causal");
  std::optional<double> acausal = find_mae("LPF_acausal");
  if (const auto tt = find_mae("LPF_acausal_testtuned"); tt && (!acausal || *tt < *acausal))
    acausal = tt;

  std::vector<RankingRow> rows;
  rows.reserve(methods.size());
  for (const auto& m : methods) {
    RankingRow row;
    row.result = m;
    const auto reduction = [&](const std::optional<double>& base) {
      return (base && m.present && *base > 0.0) ? (*base - m.overall_mae) / *base : 0.0;
    };
    row.reduction_vs_sp = reduction(sp);
    row.reduction_vs_causal = reduction(causal);
    row.reduction_vs_acausal = reduction(acausal);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_ranking_csv(const std::vector<RankingRow>& rows, const std::string& path,
                       const std::vector<std::string>& comments) {
  auto out = open_csv(path, comments);
  out << "method,present,overall_mae,q0,q25,q50,q75,q100,mean,"
         "reduction_vs_sp,reduction_vs_causal,reduction_vs_acausal\n";
  for (const auto& row : rows) {
    const auto& m = row.result;
    out << m.method << ',' << (m.present ? "yes" : "absent");
    if (m.present) {
      out << ',' << format_double(m.overall_mae);
      for (const double q : m.summary) out << ',' << format_double(q);
      out << ',' << format_double(row.reduction_vs_sp) << ','
          << format_double(row.reduction_vs_causal) << ','
          << format_double(row.reduction_vs_acausal);
    } else {
      for (int i = 0; i < 10; ++i) out << ',';
    }
    out << '\n';
  }
  require(out.good(), "io-error", "write failed: " + path);
}

void write_error_distribution_csv(const std::vector<MethodResult>& methods,
                                  const std::string& path,
                                  const std::vector<std::string>& comments) {
  auto out = open_csv(path, comments);
  out << "method,maneuver_id,mae\n";
  for (const auto& m : methods) {
    if (!m.present) continue;
    for (const auto& [maneuver, mae] : m.per_segment)
      out << m.method << ',' << maneuver << ',' << format_double(mae) << '\n';
  }
  require(out.good(), "io-error", "write failed: " + path);
}

void write_timeseries_csv(const TimeSeriesExport& series, const std::string& path,
                          const std::vector<std::string>& comments) {
  auto out = open_csv(path, comments);
  out << "t,v_SP,v_EM,v_LPF_acausal,v_GRU,v_ref\n";
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    out << format_double(series.t[i]) << ',' << format_double(series.v_sp[i]) << ','
        << format_double(series.v_em[i]) << ',' << format_double(series.v_lpf_acausal[i]) << ','
        << format_double(series.v_gru[i]) << ',' << format_double(series.v_ref[i]) << '\n';
  }
  require(out.good(), "io-error", "write failed: " + path);
}

std::vector<bool> standstill_mask(const std::vector<std::vector<double>>& reference_mps,
                                  const std::vector<Segment>& segments, std::size_t washout,
                                  std::size_t min_run) {
  require(reference_mps.size() == 2, "bad-prediction-shape");
  const std::size_t n = reference_mps[0].size();
  std::vector<bool> mask(n, false);
  for (const auto& seg : segments) {
    const std::size_t begin = seg.begin + std::min(washout, seg.size());
    std::size_t run_start = begin;
    bool in_run = false;
    for (std::size_t i = begin; i <= seg.end; ++i) {
      const bool zero =
          i < seg.end && reference_mps[0][i] == 0.0 && reference_mps[1][i] == 0.0;
      if (zero && !in_run) {
        run_start = i;
        in_run = true;
      } else if (!zero && in_run) {
        if (i - run_start >= min_run)
          for (std::size_t k = run_start; k < i; ++k) mask[k] = true;
        in_run = false;
      }
    }
  }
  return mask;
}

double mean_abs_over_mask(const std::vector<std::vector<double>>& prediction_mps,
                          const std::vector<bool>& mask) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    double v = 0.0;
    for (const auto& ch : prediction_mps) v += ch[i];
    acc += std::abs(v / static_cast<double>(prediction_mps.size()));
    ++count;
  }
  require(count > 0, "empty-input", "no standstill samples in the mask");
  return acc / static_cast<double>(count);
}

}  // namespace vws
