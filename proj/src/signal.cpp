#include "vws/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "vws/error.hpp"
#include "vws/rng.hpp"

namespace vws {

bool SignalFrame::has_channel(std::string_view name) const {
  for (const auto& [n, _] : channels)
    if (n == name) return true;
  return false;
}

const std::vector<double>& SignalFrame::channel(std::string_view name) const {
  for (const auto& [n, data] : channels)
    if (n == name) return data;
  fail("missing-channel:" + std::string(name));
}

std::vector<double>& SignalFrame::channel(std::string_view name) {
  for (auto& [n, data] : channels)
    if (n == name) return data;
  fail("missing-channel:" + std::string(name));
}

void SignalFrame::add_channel(std::string name, std::vector<double> data) {
  require(!has_channel(name), "duplicate-channel", name);
  channels.emplace_back(std::move(name), std::move(data));
}

std::vector<std::string> SignalFrame::maneuver_ids() const {
  std::vector<std::string> ids;
  for (const auto& seg : segments)
    if (std::find(ids.begin(), ids.end(), seg.maneuver_id) == ids.end())
      ids.push_back(seg.maneuver_id);
  return ids;
}

void SignalFrame::validate() const {
  require(sample_rate > 0.0, "invalid-frame", "sample_rate must be positive");
  require(!channels.empty(), "invalid-frame", "no channels");
  const std::size_t n = length();
  require(n >= 1, "invalid-frame", "zero-length channels");
  for (const auto& [name, data] : channels)
    require(data.size() == n, "invalid-frame", "unequal channel length: " + name);
  std::size_t cursor = 0;
  for (const auto& seg : segments) {
    require(seg.begin == cursor && seg.end > seg.begin, "invalid-frame",
            "segments must be sorted, non-overlapping and covering");
    cursor = seg.end;
  }
  require(cursor == n, "invalid-frame", "segments do not cover the frame");
}

SignalFrame zoh_resample(const SignalFrame& frame, double target_rate) {
  require(target_rate > 0.0, "invalid-rate");
  require(!frame.channels.empty() && frame.length() >= 1, "empty-input");

  const std::size_t n_in = frame.length();
  const double ratio_in = frame.sample_rate / target_rate;   // input samples per output sample
  const double ratio_out = target_rate / frame.sample_rate;  // output samples per input sample

  // Number of output samples whose timestamp does not pass the last input.
  const auto n_out =
      static_cast<std::size_t>(std::floor(static_cast<double>(n_in - 1) * ratio_out + 1e-9)) + 1;

  SignalFrame out;
  out.sample_rate = target_rate;
  out.t0 = frame.t0;
  out.channels.reserve(frame.channels.size());
  std::vector<std::size_t> src_index(n_out);
  for (std::size_t j = 0; j < n_out; ++j) {
    auto idx = static_cast<std::size_t>(std::floor(static_cast<double>(j) * ratio_in + 1e-9));
    src_index[j] = std::min(idx, n_in - 1);
  }
  for (const auto& [name, data] : frame.channels) {
    std::vector<double> resampled(n_out);
    for (std::size_t j = 0; j < n_out; ++j) resampled[j] = data[src_index[j]];
    out.channels.emplace_back(name, std::move(resampled));
  }

  std::size_t cursor = 0;
  for (std::size_t s = 0; s < frame.segments.size(); ++s) {
    const auto& seg = frame.segments[s];
    std::size_t end = (s + 1 == frame.segments.size())
                          ? n_out
                          : std::min<std::size_t>(
                                n_out, static_cast<std::size_t>(std::llround(
                                           static_cast<double>(seg.end) * ratio_out)));
    end = std::max(end, cursor);
    if (end > cursor) out.segments.push_back({seg.maneuver_id, cursor, end});
    cursor = end;
  }
  if (frame.segments.empty()) out.segments.clear();
  return out;
}

std::vector<double> rot_to_translational(std::span<const double> omega, double radius,
                                         double gear_ratio) {
  require(radius > 0.0 && gear_ratio > 0.0, "invalid-geometry");
  std::vector<double> v(omega.size());
  const double scale = radius / gear_ratio;
  for (std::size_t i = 0; i < omega.size(); ++i) v[i] = omega[i] * scale;
  return v;
}

DatasetSplit split_by_maneuver(const SignalFrame& frame, std::array<double, 3> fractions,
                               std::uint64_t seed) {
  const double fsum = fractions[0] + fractions[1] + fractions[2];
  require(std::abs(fsum - 1.0) < 1e-9, "invalid-fractions", "fractions must sum to 1");

  // Aggregate sample counts per maneuver id.
  std::vector<std::string> ids = frame.maneuver_ids();
  require(frame.segments.size() >= 3 && ids.size() >= 3, "too-few-maneuvers");
  std::vector<double> sizes(ids.size(), 0.0);
  for (const auto& seg : frame.segments) {
    const auto it = std::find(ids.begin(), ids.end(), seg.maneuver_id);
    sizes[static_cast<std::size_t>(it - ids.begin())] += static_cast<double>(seg.size());
  }
  const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);

  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0x5917));
  rng.shuffle(order);

  // Greedy: each maneuver goes to the split with the largest remaining
  // sample deficit; ties resolve in train/validation/test order.
  std::array<double, 3> assigned = {0.0, 0.0, 0.0};
  std::array<std::vector<std::string>, 3> buckets;
  for (const std::size_t idx : order) {
    int best = 0;
    double best_deficit = fractions[0] * total - assigned[0];
    for (int k = 1; k < 3; ++k) {
      const double deficit = fractions[k] * total - assigned[k];
      if (deficit > best_deficit + 1e-12) {
        best = k;
        best_deficit = deficit;
      }
    }
    buckets[static_cast<std::size_t>(best)].push_back(ids[idx]);
    assigned[static_cast<std::size_t>(best)] += sizes[idx];
  }
  return DatasetSplit{buckets[0], buckets[1], buckets[2]};
}

SignalFrame select_maneuvers(const SignalFrame& frame, std::span<const std::string> ids) {
  SignalFrame out;
  out.sample_rate = frame.sample_rate;
  out.t0 = frame.t0;
  for (const auto& [name, _] : frame.channels) out.channels.emplace_back(name, std::vector<double>{});
  for (const auto& seg : frame.segments) {
    if (std::find(ids.begin(), ids.end(), seg.maneuver_id) == ids.end()) continue;
    const std::size_t begin_out = out.length();
    for (std::size_t c = 0; c < frame.channels.size(); ++c) {
      const auto& src = frame.channels[c].second;
      auto& dst = out.channels[c].second;
      dst.insert(dst.end(), src.begin() + static_cast<std::ptrdiff_t>(seg.begin),
                 src.begin() + static_cast<std::ptrdiff_t>(seg.end));
    }
    out.segments.push_back({seg.maneuver_id, begin_out, out.length()});
  }
  return out;
}

SignalFrame concat_frames(std::span<const SignalFrame> frames) {
  require(!frames.empty(), "empty-input");
  SignalFrame out;
  out.sample_rate = frames.front().sample_rate;
  out.t0 = frames.front().t0;
  for (const auto& [name, _] : frames.front().channels)
    out.channels.emplace_back(name, std::vector<double>{});
  for (const auto& frame : frames) {
    require(frame.sample_rate == out.sample_rate, "invalid-frame", "rate mismatch in concat");
    require(frame.channels.size() == out.channels.size(), "invalid-frame",
            "channel mismatch in concat");
    const std::size_t offset = out.length();
    for (std::size_t c = 0; c < frame.channels.size(); ++c) {
      require(frame.channels[c].first == out.channels[c].first, "invalid-frame",
              "channel mismatch in concat");
      auto& dst = out.channels[c].second;
      const auto& src = frame.channels[c].second;
      dst.insert(dst.end(), src.begin(), src.end());
    }
    for (const auto& seg : frame.segments)
      out.segments.push_back({seg.maneuver_id, seg.begin + offset, seg.end + offset});
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_dataset_csv(const SignalFrame& frame, const std::string& path,
                       const std::vector<std::string>& comments) {
  frame.validate();
  for (std::size_t c = 1; c + 1 < channels::kCsvColumns.size(); ++c)
    require(frame.has_channel(channels::kCsvColumns[c]), "csv-schema",
            std::string("frame lacks channel ") + channels::kCsvColumns[c]);

  std::ofstream out(path, std::ios::binary);
  require(out.good(), "io-error", "cannot open for writing: " + path);
  for (const auto& line : comments) out << "# " << line << "\n";
  for (std::size_t c = 0; c < channels::kCsvColumns.size(); ++c) {
    if (c) out << ',';
    out << channels::kCsvColumns[c];
  }
  out << '\n';

  std::vector<const std::vector<double>*> cols;
  for (std::size_t c = 1; c + 1 < channels::kCsvColumns.size(); ++c)
    cols.push_back(&frame.channel(channels::kCsvColumns[c]));

  std::size_t seg_idx = 0;
  for (std::size_t i = 0; i < frame.length(); ++i) {
    while (seg_idx < frame.segments.size() && i >= frame.segments[seg_idx].end) ++seg_idx;
    out << format_double(frame.time_at(i));
    for (const auto* col : cols) out << ',' << format_double((*col)[i]);
    out << ',' << (seg_idx < frame.segments.size() ? frame.segments[seg_idx].maneuver_id : "") << '\n';
  }
  require(out.good(), "io-error", "write failed: " + path);
}

SignalFrame read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "io-error", "cannot open: " + path);

  std::string line;
  // Skip comment lines.
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
  }
  require(!line.empty(), "csv-schema", "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  require(header.size() == channels::kCsvColumns.size(), "csv-schema",
          "expected 9 columns, got " + std::to_string(header.size()));
  for (std::size_t c = 0; c < header.size(); ++c)
    require(header[c] == channels::kCsvColumns[c], "csv-schema",
            "column " + std::to_string(c) + " must be " + channels::kCsvColumns[c]);

  std::vector<double> t;
  std::array<std::vector<double>, 7> cols;
  std::vector<std::string> maneuvers;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c == 0) {
        t.push_back(std::strtod(cell.c_str(), nullptr));
      } else if (c <= 7) {
        cols[c - 1].push_back(std::strtod(cell.c_str(), nullptr));
      } else {
        maneuvers.push_back(cell);
      }
      ++c;
    }
    require(c == 9, "csv-schema", "row with " + std::to_string(c) + " cells");
  }
  require(!t.empty(), "csv-schema", "no data rows");

  SignalFrame frame;
  frame.t0 = t.front();
  if (t.size() >= 2) {
    const double dt = t[1] - t[0];
    require(dt > 0.0, "csv-schema", "non-increasing time column");
    double rate = 1.0 / dt;
    if (std::abs(rate - std::round(rate)) < 1e-6 * rate) rate = std::round(rate);
    frame.sample_rate = rate;
  } else {
    frame.sample_rate = 1.0;
  }
  for (std::size_t c = 1; c + 1 < channels::kCsvColumns.size(); ++c)
    frame.channels.emplace_back(channels::kCsvColumns[c], std::move(cols[c - 1]));

  // Rebuild segments from contiguous maneuver-id runs.
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= maneuvers.size(); ++i) {
    if (i == maneuvers.size() || maneuvers[i] != maneuvers[begin]) {
      frame.segments.push_back({maneuvers[begin], begin, i});
      begin = i;
    }
  }
  frame.validate();
  return frame;
}

}  // namespace vws
