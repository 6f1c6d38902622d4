#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "vws/nn/model.hpp"
#include "vws/signal.hpp"

namespace vws::nn {

// Per-channel z-score statistics, fitted on the training split only.
struct Normalization {
  std::vector<double> in_mean, in_std;    // model input channels
  std::vector<double> out_mean, out_std;  // target channels

  static Normalization fit(const SignalFrame& train_frame);

  // Normalized model inputs / targets for a whole frame, [step][dim].
  Sequence inputs(const SignalFrame& frame) const;
  Sequence targets(const SignalFrame& frame) const;

  double denormalize_output(double value, std::size_t dim) const {
    return out_mean[dim] + out_std[dim] * value;
  }
  double normalize_output(double value, std::size_t dim) const {
    return (value - out_mean[dim]) / out_std[dim];
  }
};

struct TrainConfig {
  std::size_t window = 200;
  std::size_t washout = 50;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 300;
  double lr_max = 8e-3;
  double lr_min = 1e-6;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  std::vector<double> best_weights;
  Normalization norm;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;  // 1-based
  double best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t epochs_run = 0;
};

// Return false to stop after the current epoch (rung-based early stopping).
using EpochCallback = std::function<bool(std::size_t epoch, double val_loss)>;

// Windows of cfg.window samples with 50% overlap, never crossing maneuver
// boundaries; short tails are dropped. Each epoch shuffles windows
// (seeded), accumulates batch-mean gradients, and steps RAdam under a
// cosine schedule spanning max_epochs. Validation runs over full maneuvers
// with the washout applied at each maneuver start; the best-validation
// weights are returned. Losses are in normalized units.
TrainResult train(const ModelSpec& spec, const TrainConfig& cfg, const SignalFrame& train_frame,
                  const SignalFrame& val_frame, const EpochCallback& callback = {});

// Model predictions over a frame, per maneuver segment, de-normalized to
// rad/s. Each segment starts from a fresh state.
std::vector<std::vector<double>> predict_frame(const ModelSpec& spec,
                                               const std::vector<double>& weights,
                                               const Normalization& norm,
                                               const SignalFrame& frame);

}  // namespace vws::nn
