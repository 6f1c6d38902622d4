#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vws/asha.hpp"
#include "vws/butterworth.hpp"
#include "vws/drivetrain.hpp"
#include "vws/encoder.hpp"
#include "vws/nn/train.hpp"

namespace vws {

struct ModelTrainSection {
  nn::TrainConfig train;
  std::size_t hidden_size = 32;
  std::size_t tcn_layers = 6;
  std::size_t kernel_size = 3;
};

// One strict JSON document drives the whole pipeline. Every field has a
// default, so an empty config runs the full experiment; unknown keys are
// rejected with their JSON pointer path. The hash of the effective config
// is embedded into every output.
struct ExperimentConfig {
  // sim
  DrivetrainParams sim_params;
  std::uint64_t suite_seed = 101;
  std::uint64_t sim_seed = 202;
  double duration_min = 60.0;
  double dt = 0.001;

  // sensors
  EncoderConfig sp_encoder;
  EncoderConfig ref_encoder;
  double motor_noise_std = 0.10;  // rad/s at the motor shaft
  std::uint64_t sensor_seed = 303;

  // split
  std::array<double, 3> split_fractions = {0.7, 0.2, 0.1};
  std::uint64_t split_seed = 404;

  // filters
  FilterSearchRanges filter_ranges;
  PsoBudget pso;

  // train (per architecture)
  ModelTrainSection train_gru;
  ModelTrainSection train_lstm;
  ModelTrainSection train_tcn;

  // hpo
  hpo::AshaConfig hpo;

  // eval
  std::vector<std::string> timeseries_maneuvers = {"tipin_tipout_cycles_0"};
  std::size_t eval_washout = 50;  // samples skipped at each maneuver start when scoring

  std::uint64_t config_hash = 0;  // FNV-1a of the canonical serialized form

  const ModelTrainSection& train_section(nn::Arch arch) const;
  ModelTrainSection& train_section(nn::Arch arch);
};

ExperimentConfig default_config();

// Parse with strict key checking; missing file or empty path yields the
// defaults. The VW_SEED environment variable, when set, overrides every
// seed field afterwards.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& json_text);

std::string config_to_json_text(const ExperimentConfig& cfg);
std::uint64_t hash_config(const ExperimentConfig& cfg);

// Comment lines embedded into output CSV files.
std::vector<std::string> provenance_comments(const ExperimentConfig& cfg);

// FilterSpec JSON sidecar: {"label", "order", "cutoff_hz", "mae", "shift"?,
// "config_hash"} (shift only for the acausal variant).
void save_filter_spec(const FilterSpec& spec, double mae, const std::string& label,
                      const std::string& path, std::uint64_t config_hash = 0);
struct LoadedFilterSpec {
  FilterSpec spec;
  double mae = 0.0;
  std::string label;
};
LoadedFilterSpec load_filter_spec(const std::string& path);

}  // namespace vws
