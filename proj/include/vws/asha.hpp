#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace vws::hpo {

inline constexpr double kLargeLoss = 1e300;

struct AshaConfig {
  std::size_t max_resource = 300;  // epochs
  std::size_t min_resource = 3;
  unsigned reduction_factor = 3;  // eta
  std::size_t num_samples = 100;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  // sampling ranges
  std::size_t hidden_min = 16;
  std::size_t hidden_max = 160;
  double lr_min = 1e-4;
  double lr_max = 1e-2;  // log-uniform
  std::size_t batch_min = 16;
  std::size_t batch_max = 128;

  void validate() const;
  std::vector<std::size_t> rungs() const;  // min_resource * eta^k, strictly below max_resource
};

struct SampledConfig {
  std::size_t trial_id = 0;
  std::size_t hidden_size = 0;
  std::size_t batch_size = 0;
  double learning_rate = 0.0;
  std::uint64_t init_seed = 0;
  std::uint64_t train_seed = 0;
};

enum class TrialStatus { kRunning, kStopped, kCompleted };

struct TrialRecord {
  SampledConfig config;
  std::vector<std::pair<std::size_t, double>> rung_losses;  // (epoch, validation loss)
  TrialStatus status = TrialStatus::kRunning;
  double best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t epochs_run = 0;
  double test_mae = std::numeric_limits<double>::quiet_NaN();  // winner only, post-hoc
};

// One promotion decision, with its decision-time snapshot so searches can
// be audited and replayed.
struct RungEvent {
  std::size_t trial_id = 0;
  std::size_t rung_epoch = 0;
  double loss = 0.0;
  std::size_t n_at_rung = 0;     // losses recorded at this rung, including this one
  std::size_t allowed = 0;       // max(1, floor(n / eta))
  std::size_t better_count = 0;  // strictly better losses at decision time
  bool promoted = false;
};

struct TrialOutcome {
  double best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t epochs_run = 0;
};

// Called after every epoch; returns whether the trial may continue.
using RungCallback = std::function<bool(std::size_t epoch, double val_loss)>;

// Runs one trial to completion or until the callback stops it. Diverging
// trials throw Error("diverged"); the search absorbs them as stopped with
// kLargeLoss.
using TrainerFn = std::function<TrialOutcome(const SampledConfig&, const RungCallback&)>;

struct AshaResult {
  std::size_t best_trial = 0;  // index into trials
  std::vector<TrialRecord> trials;
  std::vector<RungEvent> events;
  std::size_t total_epochs = 0;
};

// Asynchronous successive halving with the stopping rule: when a trial
// reaches a rung it continues only while its loss ranks in the best 1/eta
// of the results recorded at that rung so far. Decisions never wait for
// stragglers. Throws Error("all-trials-failed") when nothing completes.
AshaResult asha_search(const AshaConfig& cfg, const TrainerFn& trainer);

// Replays the event log against the promotion rule; returns false and
// fills `error` on the first inconsistency.
bool replay_promotions(const std::vector<RungEvent>& events, unsigned eta, std::string* error);

}  // namespace vws::hpo
