#pragma once

#include <map>
#include <optional>
#include <string>

#include "vws/asha.hpp"
#include "vws/config.hpp"
#include "vws/evaluate.hpp"
#include "vws/nn/checkpoint.hpp"
#include "vws/nn/train.hpp"
#include "vws/signal.hpp"

namespace vws {

// Suite -> simulate -> concatenate; ground-truth channels at 50 Hz.
SignalFrame generate_truth(const ExperimentConfig& cfg);

// Truth degraded through the sensor models: the 9-column dataset frame.
SignalFrame generate_dataset(const ExperimentConfig& cfg);

struct SplitFrames {
  DatasetSplit split;
  SignalFrame train;
  SignalFrame validation;
  SignalFrame test;
};
SplitFrames split_dataset(const SignalFrame& dataset, const ExperimentConfig& cfg);

nn::ModelSpec make_model_spec(nn::Arch arch, const ExperimentConfig& cfg,
                              std::size_t hidden_size, std::uint64_t init_seed);

// Train one model with the config's per-arch section; returns a checkpoint
// carrying the normalization statistics.
struct SingleTrainResult {
  nn::Checkpoint checkpoint;
  nn::TrainResult train;
};
SingleTrainResult train_single(nn::Arch arch, const ExperimentConfig& cfg,
                               const SignalFrame& train_frame, const SignalFrame& val_frame);

// ASHA over (hidden size, batch size, learning rate) with the per-arch
// section supplying the remaining training knobs. The winner is retrained
// with its own seeds (deterministic) to recover its weights.
struct HpoRunResult {
  hpo::AshaResult search;
  nn::Checkpoint winner;
  nn::TrainResult winner_train;
  hpo::SampledConfig winner_config;
};
HpoRunResult run_hpo(nn::Arch arch, const ExperimentConfig& cfg, const SignalFrame& train_frame,
                     const SignalFrame& val_frame);

struct MethodArtifacts {
  std::optional<FilterSpec> causal;
  std::optional<FilterSpec> acausal;
  std::optional<FilterSpec> acausal_testtuned;
  std::map<std::string, nn::Checkpoint> models;  // keyed by arch name ("gru", ...)
};

struct EvaluationOutput {
  std::vector<MethodResult> methods;
  std::vector<RankingRow> ranking;
  std::map<std::string, double> standstill_mean_abs;  // methods with a standstill figure
  bool has_standstill = false;
};

EvaluationOutput evaluate_all(const SignalFrame& test_frame, const ExperimentConfig& cfg,
                              const MethodArtifacts& artifacts);

// Fig. 2-style gate: MAE(best NN) < MAE(acausal) < MAE(causal) < MAE(SP)
// with a minimum relative gap per step, and a minimum NN reduction vs SP.
struct OrderingCheck {
  bool ok = false;
  std::string detail;
};
OrderingCheck check_method_ordering(const EvaluationOutput& eval, double min_gap = 0.05,
                                    double min_nn_vs_sp = 0.5);

// Per-maneuver time-series export (Fig. 3 analog).
TimeSeriesExport export_timeseries(const SignalFrame& test_frame, const ExperimentConfig& cfg,
                                   const MethodArtifacts& artifacts,
                                   const std::string& maneuver_id);

// Hidden-size sweep (Fig. 4 analog): repeats models per size with distinct
// seeds, recording per-trial validation loss and FLOPs per step.
struct SweepRow {
  std::size_t hidden_size = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double val_loss = 0.0;
  bool diverged = false;
  std::size_t flops = 0;
};
std::vector<SweepRow> hidden_size_sweep(nn::Arch arch, const std::vector<std::size_t>& sizes,
                                        std::size_t repeats, const ExperimentConfig& cfg,
                                        const SignalFrame& train_frame,
                                        const SignalFrame& val_frame);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path,
                     const std::vector<std::string>& comments = {});

}  // namespace vws
