#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vws {

// Canonical channel names shared across the pipeline.
namespace channels {
inline constexpr const char* kTime = "t";
inline constexpr const char* kWheelLeftSp = "omega_RL_SP";
inline constexpr const char* kWheelRightSp = "omega_RR_SP";
inline constexpr const char* kMotorSp = "omega_EM_SP";
inline constexpr const char* kDriveTorque = "M_drive";
inline constexpr const char* kBrakeTorque = "M_brake";
inline constexpr const char* kWheelLeftRef = "omega_RL_ref";
inline constexpr const char* kWheelRightRef = "omega_RR_ref";
inline constexpr const char* kManeuver = "maneuver_id";

// Ground-truth channels emitted by the simulator (never serialized to the
// dataset CSV; the reference encoder stands in as ground truth downstream).
inline constexpr const char* kWheelLeftTrue = "omega_RL_true";
inline constexpr const char* kWheelRightTrue = "omega_RR_true";
inline constexpr const char* kMotorTrue = "omega_EM_true";
inline constexpr const char* kTwistTrue = "shaft_twist_true";

inline constexpr std::array<const char*, 5> kModelInputs = {
    kWheelLeftSp, kWheelRightSp, kMotorSp, kDriveTorque, kBrakeTorque};
inline constexpr std::array<const char*, 2> kModelTargets = {kWheelLeftRef, kWheelRightRef};

// Dataset CSV column order, fixed.
inline constexpr std::array<const char*, 9> kCsvColumns = {
    kTime,       kWheelLeftSp,  kWheelRightSp, kMotorSp,  kDriveTorque,
    kBrakeTorque, kWheelLeftRef, kWheelRightRef, kManeuver};
}  // namespace channels

// Half-open [begin, end) index range belonging to one driving maneuver.
struct Segment {
  std::string maneuver_id;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
};

// Uniformly sampled multi-channel time series. Timestamps are implicit:
// sample i sits at t0 + i / sample_rate. Segments partition [0, length).
struct SignalFrame {
  double sample_rate = 0.0;  // Hz
  double t0 = 0.0;           // s
  std::vector<std::pair<std::string, std::vector<double>>> channels;  // ordered
  std::vector<Segment> segments;

  std::size_t length() const { return channels.empty() ? 0 : channels.front().second.size(); }
  double time_at(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }

  bool has_channel(std::string_view name) const;
  const std::vector<double>& channel(std::string_view name) const;
  std::vector<double>& channel(std::string_view name);
  void add_channel(std::string name, std::vector<double> data);

  // Unique maneuver ids in first-appearance order.
  std::vector<std::string> maneuver_ids() const;

  // Throws Error("invalid-frame") when an invariant is broken: unequal
  // channel lengths, empty frame, non-positive rate, or segments that do
  // not partition [0, length) in sorted order.
  void validate() const;
};

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

// Zero-order-hold resampling. Each output sample holds the most recent
// input sample at or before its timestamp; segment boundaries are remapped
// to the nearest output index.
SignalFrame zoh_resample(const SignalFrame& frame, double target_rate);

// v = omega * radius / gear_ratio. Pass gear_ratio = 1 for wheel signals;
// the drivetrain ratio for motor signals.
std::vector<double> rot_to_translational(std::span<const double> omega, double radius,
                                         double gear_ratio = 1.0);

// Whole maneuvers are assigned to train/validation/test by seeded shuffle
// followed by greedy largest-deficit bin filling over sample counts.
DatasetSplit split_by_maneuver(const SignalFrame& frame, std::array<double, 3> fractions,
                               std::uint64_t seed);

// Sub-frame containing only the listed maneuvers (segment order preserved,
// samples re-packed contiguously).
SignalFrame select_maneuvers(const SignalFrame& frame, std::span<const std::string> ids);

// Concatenate frames with identical channel sets and rates.
SignalFrame concat_frames(std::span<const SignalFrame> frames);

// Dataset CSV interchange: UTF-8, '#'-prefixed comment lines, then a header
// row with the fixed 9-column schema, '.' decimal separator.
void write_dataset_csv(const SignalFrame& frame, const std::string& path,
                       const std::vector<std::string>& comments = {});
SignalFrame read_dataset_csv(const std::string& path);

}  // namespace vws
