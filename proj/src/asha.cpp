#include "vws/asha.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "vws/error.hpp"
#include "vws/rng.hpp"

namespace vws::hpo {

void AshaConfig::validate() const {
  require(reduction_factor >= 2, "invalid-asha-config", "eta must be >= 2");
  require(min_resource >= 1, "invalid-asha-config", "min_resource must be >= 1");
  require(max_resource >= min_resource, "invalid-asha-config",
          "max_resource must be >= min_resource");
  require(num_samples >= 1, "invalid-asha-config", "num_samples must be >= 1");
  require(hidden_min >= 1 && hidden_min <= hidden_max, "invalid-asha-config", "hidden range");
  require(lr_min > 0.0 && lr_min <= lr_max, "invalid-asha-config", "lr range");
  require(batch_min >= 1 && batch_min <= batch_max, "invalid-asha-config", "batch range");
}

std::vector<std::size_t> AshaConfig::rungs() const {
  std::vector<std::size_t> out;
  for (std::size_t r = min_resource; r < max_resource; r *= reduction_factor) out.push_back(r);
  return out;
}

namespace {

std::vector<SampledConfig> sample_configs(const AshaConfig& cfg) {
  std::vector<SampledConfig> configs(cfg.num_samples);
  Rng rng(mix_seed(cfg.seed, 0xa54a));
  for (std::size_t i = 0; i < cfg.num_samples; ++i) {
    auto& c = configs[i];
    c.trial_id = i;
    c.hidden_size = static_cast<std::size_t>(rng.uniform_int(
        static_cast<std::int64_t>(cfg.hidden_min), static_cast<std::int64_t>(cfg.hidden_max)));
    c.batch_size = static_cast<std::size_t>(rng.uniform_int(
        static_cast<std::int64_t>(cfg.batch_min), static_cast<std::int64_t>(cfg.batch_max)));
    c.learning_rate = std::exp(rng.uniform(std::log(cfg.lr_min), std::log(cfg.lr_max)));
    c.init_seed = mix_seed(cfg.seed, 2 * i + 1);
    c.train_seed = mix_seed(cfg.seed, 2 * i + 2);
  }
  return configs;
}

struct Coordinator {
  std::mutex mutex;
  std::map<std::size_t, std::vector<double>> rung_losses;  // rung epoch -> losses so far
  std::vector<RungEvent> events;

  bool decide(std::size_t trial_id, std::size_t rung_epoch, double loss, unsigned eta) {
    std::lock_guard<std::mutex> lock(mutex);
    auto& losses = rung_losses[rung_epoch];
    const std::size_t better =
        static_cast<std::size_t>(std::count_if(losses.begin(), losses.end(),
                                               [&](double other) { return other < loss; }));
    losses.push_back(loss);
    const std::size_t n = losses.size();
    const std::size_t allowed = std::max<std::size_t>(1, n / eta);
    const bool promoted = better < allowed;
    events.push_back({trial_id, rung_epoch, loss, n, allowed, better, promoted});
    return promoted;
  }
};

}  // namespace

AshaResult asha_search(const AshaConfig& cfg, const TrainerFn& trainer) {
  cfg.validate();
  const std::vector<std::size_t> rungs = cfg.rungs();

  AshaResult result;
  result.trials.resize(cfg.num_samples);
  const std::vector<SampledConfig> configs = sample_configs(cfg);
  for (std::size_t i = 0; i < cfg.num_samples; ++i) result.trials[i].config = configs[i];

  Coordinator coordinator;

  const auto run_trial = [&](std::size_t index) {
    TrialRecord& trial = result.trials[index];
    const RungCallback callback = [&](std::size_t epoch, double val_loss) {
      if (!std::binary_search(rungs.begin(), rungs.end(), epoch)) return true;
      const bool promoted =
          coordinator.decide(trial.config.trial_id, epoch, val_loss, cfg.reduction_factor);
      trial.rung_losses.emplace_back(epoch, val_loss);
      return promoted;
    };
    try {
      const TrialOutcome outcome = trainer(trial.config, callback);
      trial.best_val_loss = outcome.best_val_loss;
      trial.epochs_run = outcome.epochs_run;
      trial.status =
          outcome.epochs_run >= cfg.max_resource ? TrialStatus::kCompleted : TrialStatus::kStopped;
    } catch (const Error& e) {
      if (e.code() != "diverged") throw;
      trial.best_val_loss = kLargeLoss;
      trial.status = TrialStatus::kStopped;
    }
  };

  if (cfg.workers <= 1) {
    for (std::size_t i = 0; i < cfg.num_samples; ++i) run_trial(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t n_workers = std::min(cfg.workers, cfg.num_samples);
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < cfg.num_samples; i = next.fetch_add(1))
          run_trial(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  result.events = std::move(coordinator.events);
  std::size_t best = cfg.num_samples;
  for (std::size_t i = 0; i < cfg.num_samples; ++i) {
    result.total_epochs += result.trials[i].epochs_run;
    if (result.trials[i].status != TrialStatus::kCompleted) continue;
    if (best == cfg.num_samples || result.trials[i].best_val_loss < result.trials[best].best_val_loss)
      best = i;
  }
  require(best < cfg.num_samples, "all-trials-failed");
  result.best_trial = best;
  return result;
}

bool replay_promotions(const std::vector<RungEvent>& events, unsigned eta, std::string* error) {
  std::map<std::size_t, std::vector<double>> rung_losses;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    auto& losses = rung_losses[e.rung_epoch];
    const auto better = static_cast<std::size_t>(std::count_if(
        losses.begin(), losses.end(), [&](double other) { return other < e.loss; }));
    losses.push_back(e.loss);
    const std::size_t n = losses.size();
    const std::size_t allowed = std::max<std::size_t>(1, n / eta);
    const bool promoted = better < allowed;
    const bool consistent = e.n_at_rung == n && e.better_count == better &&
                            e.allowed == allowed && e.promoted == promoted;
    if (!consistent) {
      if (error)
        *error = "event " + std::to_string(i) + " (trial " + std::to_string(e.trial_id) +
                 ", rung " + std::to_string(e.rung_epoch) + ") inconsistent with replay";
      return false;
    }
  }
  return true;
}

}  // namespace vws::hpo
