// vws: synthetic lab for neural virtual wheel-speed sensing.
// Subcommands generate data, tune filter baselines, train and search
// models, and evaluate everything against the reference wheel speeds.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "vws/config.hpp"
#include "vws/error.hpp"
#include "vws/experiment.hpp"
#include "vws/nn/checkpoint.hpp"
#include "vws/nn/model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDataSchema = 3;
constexpr int kExitCheckFailed = 4;
constexpr int kExitDiverged = 5;

int exit_code_for(const vws::Error& e) {
  const std::string& code = e.code();
  if (code == "config-error" || code == "invalid-fractions") return kExitConfig;
  if (code == "csv-schema" || code.rfind("missing-channel", 0) == 0 || code == "invalid-frame")
    return kExitDataSchema;
  if (code == "diverged" || code == "unstable-integration" || code == "non-finite-gradient")
    return kExitDiverged;
  return kExitError;
}

vws::nn::Arch parse_arch(const std::string& name) { return vws::nn::arch_from_name(name); }

// "key=value,key=value" option lists.
std::map<std::string, std::string> parse_kv_list(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t begin = 0;
  while (begin < text.size()) {
    std::size_t end = text.find(',', begin);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(begin, end - begin);
    const std::size_t eq = item.find('=');
    vws::require(eq != std::string::npos, "config-error", "expected key=value, got " + item);
    out[item.substr(0, eq)] = item.substr(eq + 1);
    begin = end + 1;
  }
  return out;
}

struct DatasetOnDisk {
  vws::SignalFrame frame;
  vws::SplitFrames splits;
};

DatasetOnDisk load_and_split(const std::string& data_path, const vws::ExperimentConfig& cfg) {
  DatasetOnDisk out;
  out.frame = vws::read_dataset_csv(data_path);
  out.splits = vws::split_dataset(out.frame, cfg);
  return out;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 double duration_min_override) {
  vws::ExperimentConfig cfg = vws::load_config(config_path);
  if (duration_min_override > 0.0) {
    cfg.duration_min = duration_min_override;
    cfg.config_hash = vws::hash_config(cfg);
  }
  const vws::SignalFrame dataset = vws::generate_dataset(cfg);
  vws::write_dataset_csv(dataset, out_path, vws::provenance_comments(cfg));

  const double duration_s = static_cast<double>(dataset.length()) / dataset.sample_rate;
  std::printf("wrote %s\n", out_path.c_str());
  std::printf("samples: %zu at %.0f Hz (%.1f min)\n", dataset.length(), dataset.sample_rate,
              duration_s / 60.0);
  std::printf("maneuvers: %zu\n", dataset.maneuver_ids().size());
  return kExitOk;
}

int cmd_tune_filter(const std::string& config_path, const std::string& data_path,
                    const std::string& variant, bool allow_test_tuning, std::int64_t seed,
                    const std::string& out_path) {
  vws::ExperimentConfig cfg = vws::load_config(config_path);
  if (seed >= 0) cfg.pso.seed = static_cast<std::uint64_t>(seed);
  const DatasetOnDisk data = load_and_split(data_path, cfg);

  const bool acausal = variant == "acausal";
  vws::require(acausal || variant == "causal", "config-error",
               "--variant must be causal or acausal");
  const vws::SignalFrame& objective =
      allow_test_tuning ? data.splits.test : data.splits.validation;
  std::string label = acausal ? "LPF_acausal" : "LPF_causal";
  if (allow_test_tuning) {
    vws::require(acausal, "config-error", "--allow-test-tuning applies to the acausal variant");
    label = "LPF_acausal_testtuned";
  }

  const vws::FilterTuneResult tuned = vws::tune_filter(
      objective, acausal ? vws::FilterVariant::kAcausal : vws::FilterVariant::kCausal,
      cfg.sim_params.tire_radius, cfg.sim_params.gear_ratio, cfg.filter_ranges, cfg.pso,
      cfg.eval_washout);
  vws::save_filter_spec(tuned.spec, tuned.mae, label, out_path, cfg.config_hash);
  std::printf("%s: order=%d cutoff=%.4f Hz", label.c_str(), tuned.spec.order,
              tuned.spec.cutoff_hz);
  if (acausal) std::printf(" shift=%d", tuned.spec.shift);
  std::printf("  MAE=%.6f m/s (%s split)\n", tuned.mae, allow_test_tuning ? "test" : "validation");
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& data_path,
              const std::string& arch_name, const std::string& out_path) {
  const vws::ExperimentConfig cfg = vws::load_config(config_path);
  const DatasetOnDisk data = load_and_split(data_path, cfg);
  const vws::nn::Arch arch = parse_arch(arch_name);

  const vws::SingleTrainResult result =
      vws::train_single(arch, cfg, data.splits.train, data.splits.validation);
  vws::nn::save_checkpoint(result.checkpoint, out_path);
  std::printf("trained %s: best val MSE %.6g (epoch %zu/%zu), %zu params\n", arch_name.c_str(),
              result.train.best_val_loss, result.train.best_epoch, result.train.epochs_run,
              result.checkpoint.weights.size());
  std::printf("wrote %s\n", out_path.c_str());
  return kExitOk;
}

int cmd_hpo(const std::string& config_path, const std::string& data_path,
            const std::string& arch_name, const std::string& out_dir, std::int64_t num_samples,
            std::int64_t workers) {
  vws::ExperimentConfig cfg = vws::load_config(config_path);
  if (num_samples > 0) cfg.hpo.num_samples = static_cast<std::size_t>(num_samples);
  if (workers > 0) cfg.hpo.workers = static_cast<std::size_t>(workers);
  const DatasetOnDisk data = load_and_split(data_path, cfg);
  const vws::nn::Arch arch = parse_arch(arch_name);

  std::filesystem::create_directories(out_dir);
  vws::HpoRunResult result = vws::run_hpo(arch, cfg, data.splits.train, data.splits.validation);

  // Post-hoc test MAE for the winner.
  {
    vws::MethodArtifacts winner_only;
    winner_only.models[arch_name] = result.winner;
    const vws::EvaluationOutput eval = vws::evaluate_all(data.splits.test, cfg, winner_only);
    std::string label = arch_name;
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    for (const auto& m : eval.methods)
      if (m.present && m.method == label)
        result.search.trials[result.search.best_trial].test_mae = m.overall_mae;
  }

  // One NDJSON record per rung event for audit and plotting.
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(cfg.config_hash));
  {
    std::ofstream events(out_dir + "/events.ndjson", std::ios::binary);
    events << nlohmann::json{{"config_hash", hash_hex}, {"seed", cfg.hpo.seed}}.dump() << "\n";
    for (const auto& e : result.search.events) {
      const nlohmann::json j{{"trial", e.trial_id},   {"rung_epoch", e.rung_epoch},
                             {"loss", e.loss},        {"n_at_rung", e.n_at_rung},
                             {"allowed", e.allowed},  {"better_count", e.better_count},
                             {"promoted", e.promoted}};
      events << j.dump() << "\n";
    }
  }
  {
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : result.search.trials) {
      nlohmann::json rungs = nlohmann::json::array();
      for (const auto& [epoch, loss] : t.rung_losses)
        rungs.push_back({{"epoch", epoch}, {"loss", loss}});
      nlohmann::json record{{"trial", t.config.trial_id},
                            {"hidden_size", t.config.hidden_size},
                            {"batch_size", t.config.batch_size},
                            {"learning_rate", t.config.learning_rate},
                            {"status", t.status == vws::hpo::TrialStatus::kCompleted
                                           ? "completed"
                                           : "stopped"},
                            {"best_val_loss", t.best_val_loss},
                            {"epochs_run", t.epochs_run},
                            {"rungs", rungs}};
      if (!std::isnan(t.test_mae)) record["test_mae"] = t.test_mae;
      trials.push_back(std::move(record));
    }
    const nlohmann::json doc{
        {"config_hash", hash_hex}, {"seed", cfg.hpo.seed}, {"trials", trials}};
    std::ofstream out(out_dir + "/trials.json", std::ios::binary);
    out << doc.dump(2) << "\n";
  }
  vws::nn::save_checkpoint(result.winner, out_dir + "/best.ckpt");

  const auto& best = result.search.trials[result.search.best_trial];
  std::printf("hpo %s: %zu trials, %zu total epochs\n", arch_name.c_str(),
              result.search.trials.size(), result.search.total_epochs);
  std::printf("winner: trial %zu hidden=%zu batch=%zu lr=%.5f val MSE %.6g test MAE %.6g\n",
              best.config.trial_id, best.config.hidden_size, best.config.batch_size,
              best.config.learning_rate, best.best_val_loss, best.test_mae);
  std::printf("wrote %s/{trials.json,events.ndjson,best.ckpt}\n", out_dir.c_str());
  return kExitOk;
}

int cmd_evaluate(const std::string& config_path, const std::string& data_path,
                 const std::string& models_arg, const std::string& filters_arg,
                 const std::string& out_dir, bool check) {
  const vws::ExperimentConfig cfg = vws::load_config(config_path);
  const DatasetOnDisk data = load_and_split(data_path, cfg);

  vws::MethodArtifacts artifacts;
  for (const auto& [key, path] : parse_kv_list(models_arg)) {
    parse_arch(key);  // validates the key
    artifacts.models[key] = vws::nn::load_checkpoint(path);
  }
  for (const auto& [key, path] : parse_kv_list(filters_arg)) {
    const vws::LoadedFilterSpec loaded = vws::load_filter_spec(path);
    if (key == "causal") {
      artifacts.causal = loaded.spec;
    } else if (key == "acausal") {
      artifacts.acausal = loaded.spec;
    } else if (key == "testtuned") {
      artifacts.acausal_testtuned = loaded.spec;
    } else {
      vws::fail("config-error", "unknown filter key " + key);
    }
  }

  std::filesystem::create_directories(out_dir);
  const vws::EvaluationOutput eval = vws::evaluate_all(data.splits.test, cfg, artifacts);
  const auto comments = vws::provenance_comments(cfg);
  vws::write_ranking_csv(eval.ranking, out_dir + "/ranking.csv", comments);
  vws::write_error_distribution_csv(eval.methods, out_dir + "/error_distribution.csv", comments);

  for (const auto& maneuver : cfg.timeseries_maneuvers) {
    const auto test_ids = data.splits.test.maneuver_ids();
    if (std::find(test_ids.begin(), test_ids.end(), maneuver) == test_ids.end()) continue;
    const vws::TimeSeriesExport series =
        vws::export_timeseries(data.splits.test, cfg, artifacts, maneuver);
    vws::write_timeseries_csv(series, out_dir + "/timeseries_" + maneuver + ".csv", comments);
  }

  std::printf("%-24s %12s %10s\n", "method", "MAE [m/s]", "vs SP");
  for (const auto& row : eval.ranking) {
    if (!row.result.present) {
      std::printf("%-24s %12s\n", row.result.method.c_str(), "absent");
      continue;
    }
    std::printf("%-24s %12.6f %9.1f%%\n", row.result.method.c_str(), row.result.overall_mae,
                100.0 * row.reduction_vs_sp);
  }

  if (check) {
    const vws::OrderingCheck ordering = vws::check_method_ordering(eval);
    std::printf("ordering check: %s (%s)\n", ordering.ok ? "pass" : "FAIL",
                ordering.detail.c_str());
    if (!ordering.ok) return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& data_path,
              const std::string& arch_name, const std::string& sizes_arg, std::int64_t repeats,
              const std::string& out_path) {
  const vws::ExperimentConfig cfg = vws::load_config(config_path);
  const DatasetOnDisk data = load_and_split(data_path, cfg);
  const vws::nn::Arch arch = parse_arch(arch_name);

  std::vector<std::size_t> sizes;
  {
    std::stringstream ss(sizes_arg);
    std::string item;
    while (std::getline(ss, item, ',')) sizes.push_back(std::stoul(item));
  }
  const auto rows = vws::hidden_size_sweep(arch, sizes, static_cast<std::size_t>(repeats), cfg,
                                           data.splits.train, data.splits.validation);
  if (const auto dir = std::filesystem::path(out_path).parent_path(); !dir.empty())
    std::filesystem::create_directories(dir);
  vws::write_sweep_csv(rows, out_path, vws::provenance_comments(cfg));

  std::printf("%8s %14s %14s\n", "hidden", "mean val MSE", "FLOPs/step");
  for (const std::size_t size : sizes) {
    double mean = 0.0;
    std::size_t count = 0, flops = 0;
    for (const auto& row : rows) {
      if (row.hidden_size != size) continue;
      mean += row.val_loss;
      flops = row.flops;
      ++count;
    }
    std::printf("%8zu %14.6g %14zu\n", size, mean / static_cast<double>(count), flops);
  }
  std::printf("wrote %s\n", out_path.c_str());
  return kExitOk;
}

int cmd_flops(const std::string& ckpt_path, double rate_hz, double clock_hz,
              double flops_per_cycle) {
  const vws::nn::Checkpoint ckpt = vws::nn::load_checkpoint(ckpt_path);
  const std::size_t flops = vws::nn::flops_per_step(ckpt.spec);
  const double util = vws::nn::ecu_budget(flops, rate_hz, clock_hz, flops_per_cycle);
  std::printf("%s hidden=%zu: %zu FLOPs/step\n", vws::nn::arch_name(ckpt.spec.arch).c_str(),
              ckpt.spec.hidden_size, flops);
  std::printf("utilization: %.4f%% at %.0f Hz on %.0f MHz x %.1f FLOP/cycle\n", 100.0 * util,
              rate_hz, clock_hz / 1e6, flops_per_cycle);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic virtual wheel-speed sensor lab"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_path, arch_name = "gru";

  auto* simulate = app.add_subcommand("simulate", "generate the synthetic dataset CSV");
  double duration_min = -1.0;
  simulate->add_option("--config", config_path, "experiment config JSON");
  simulate->add_option("--out", out_path, "output CSV path")->required();
  simulate->add_option("--duration-min", duration_min, "override total duration in minutes");

  auto* tune = app.add_subcommand("tune-filter", "PSO-tune a Butterworth baseline");
  std::string variant = "causal";
  bool allow_test_tuning = false;
  std::int64_t seed = -1;
  tune->add_option("--config", config_path, "experiment config JSON");
  tune->add_option("--data", data_path, "dataset CSV")->required();
  tune->add_option("--variant", variant, "causal | acausal")->required();
  tune->add_flag("--allow-test-tuning", allow_test_tuning,
                 "tune on the test split (optimistic bound, labeled separately)");
  tune->add_option("--seed", seed, "PSO seed override");
  tune->add_option("--out", out_path, "output filter JSON")->required();

  auto* train = app.add_subcommand("train", "train one model with the config settings");
  train->add_option("--config", config_path, "experiment config JSON");
  train->add_option("--data", data_path, "dataset CSV")->required();
  train->add_option("--arch", arch_name, "gru | lstm | tcn")->required();
  train->add_option("--out", out_path, "output checkpoint path")->required();

  auto* hpo = app.add_subcommand("hpo", "ASHA hyperparameter search");
  std::int64_t num_samples = -1, workers = -1;
  hpo->add_option("--config", config_path, "experiment config JSON");
  hpo->add_option("--data", data_path, "dataset CSV")->required();
  hpo->add_option("--arch", arch_name, "gru | lstm | tcn")->required();
  hpo->add_option("--num-samples", num_samples, "override hpo.num_samples");
  hpo->add_option("--workers", workers, "concurrent trial workers");
  hpo->add_option("--out", out_path, "output directory")->required();

  auto* evaluate = app.add_subcommand("evaluate", "score all methods on the test split");
  std::string models_arg, filters_arg;
  bool check = false;
  evaluate->add_option("--config", config_path, "experiment config JSON");
  evaluate->add_option("--data", data_path, "dataset CSV")->required();
  evaluate->add_option("--models", models_arg, "gru=path.ckpt,lstm=...,tcn=...");
  evaluate->add_option("--filters", filters_arg, "causal=f.json,acausal=f.json,testtuned=f.json");
  evaluate->add_flag("--check", check, "exit 4 unless the method ordering holds");
  evaluate->add_option("--out", out_path, "results directory")->required();

  auto* sweep = app.add_subcommand("sweep", "hidden-size sweep with repeated training");
  std::string sizes_arg = "16,32,48,64,96,128,160";
  std::int64_t repeats = 5;
  sweep->add_option("--config", config_path, "experiment config JSON");
  sweep->add_option("--data", data_path, "dataset CSV")->required();
  sweep->add_option("--arch", arch_name, "gru | lstm | tcn");
  sweep->add_option("--sizes", sizes_arg, "comma-separated hidden sizes");
  sweep->add_option("--repeats", repeats, "models per size");
  sweep->add_option("--out", out_path, "output CSV path")->required();

  auto* flops = app.add_subcommand("flops", "per-step cost and ECU budget of a checkpoint");
  std::string ckpt_path;
  double rate_hz = 50.0, clock_hz = 300e6, flops_per_cycle = 1.0;
  flops->add_option("--ckpt", ckpt_path, "checkpoint path")->required();
  flops->add_option("--rate", rate_hz, "inference rate in Hz");
  flops->add_option("--clock", clock_hz, "ECU clock in Hz");
  flops->add_option("--flops-per-cycle", flops_per_cycle, "FLOPs retired per cycle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, out_path, duration_min);
    if (tune->parsed())
      return cmd_tune_filter(config_path, data_path, variant, allow_test_tuning, seed, out_path);
    if (train->parsed()) return cmd_train(config_path, data_path, arch_name, out_path);
    if (hpo->parsed())
      return cmd_hpo(config_path, data_path, arch_name, out_path, num_samples, workers);
    if (evaluate->parsed())
      return cmd_evaluate(config_path, data_path, models_arg, filters_arg, out_path, check);
    if (sweep->parsed())
      return cmd_sweep(config_path, data_path, arch_name, sizes_arg, repeats, out_path);
    if (flops->parsed()) return cmd_flops(ckpt_path, rate_hz, clock_hz, flops_per_cycle);
  } catch (const vws::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
