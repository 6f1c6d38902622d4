#include "vws/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>

#include "vws/drivetrain.hpp"
#include "vws/encoder.hpp"
#include "vws/error.hpp"
#include "vws/rng.hpp"

namespace vws {

SignalFrame generate_truth(const ExperimentConfig& cfg) {
  const auto suite = standard_scenario_suite(cfg.suite_seed, cfg.duration_min * 60.0);
  std::vector<SignalFrame> frames;
  frames.reserve(suite.size());
  for (std::size_t i = 0; i < suite.size(); ++i)
    frames.push_back(simulate(cfg.sim_params, suite[i], cfg.dt, mix_seed(cfg.sim_seed, i)));
  return concat_frames(frames);
}

SignalFrame generate_dataset(const ExperimentConfig& cfg) {
  const SignalFrame truth = generate_truth(cfg);
  return degrade_frame(truth, cfg.sp_encoder, cfg.ref_encoder, cfg.motor_noise_std,
                       cfg.sensor_seed);
}

SplitFrames split_dataset(const SignalFrame& dataset, const ExperimentConfig& cfg) {
  SplitFrames out;
  out.split = split_by_maneuver(dataset, cfg.split_fractions, cfg.split_seed);
  out.train = select_maneuvers(dataset, out.split.train);
  out.validation = select_maneuvers(dataset, out.split.validation);
  out.test = select_maneuvers(dataset, out.split.test);
  return out;
}

nn::ModelSpec make_model_spec(nn::Arch arch, const ExperimentConfig& cfg,
                              std::size_t hidden_size, std::uint64_t init_seed) {
  const ModelTrainSection& section = cfg.train_section(arch);
  nn::ModelSpec spec;
  spec.arch = arch;
  spec.input_size = channels::kModelInputs.size();
  spec.output_size = channels::kModelTargets.size();
  spec.hidden_size = hidden_size;
  spec.tcn_layers = section.tcn_layers;
  spec.kernel_size = section.kernel_size;
  spec.seed = init_seed;
  return spec;
}

SingleTrainResult train_single(nn::Arch arch, const ExperimentConfig& cfg,
                               const SignalFrame& train_frame, const SignalFrame& val_frame) {
  const ModelTrainSection& section = cfg.train_section(arch);
  const nn::ModelSpec spec =
      make_model_spec(arch, cfg, section.hidden_size, mix_seed(section.train.seed, 0x1217));

  SingleTrainResult out;
  out.train = nn::train(spec, section.train, train_frame, val_frame);
  out.checkpoint.spec = spec;
  out.checkpoint.norm = out.train.norm;
  out.checkpoint.weights = out.train.best_weights;
  out.checkpoint.config_hash = cfg.config_hash;
  out.checkpoint.train_seed = section.train.seed;
  return out;
}

HpoRunResult run_hpo(nn::Arch arch, const ExperimentConfig& cfg, const SignalFrame& train_frame,
                     const SignalFrame& val_frame) {
  const ModelTrainSection& section = cfg.train_section(arch);

  const auto trial_train_config = [&](const hpo::SampledConfig& sample) {
    nn::TrainConfig tc = section.train;
    tc.batch_size = sample.batch_size;
    tc.lr_max = sample.learning_rate;
    tc.max_epochs = cfg.hpo.max_resource;
    tc.seed = sample.train_seed;
    return tc;
  };

  // Weights of completed trials are kept so the winner does not need a
  // retrain; training is deterministic either way.
  std::map<std::size_t, nn::TrainResult> completed;
  std::mutex completed_mutex;

  const hpo::TrainerFn trainer = [&](const hpo::SampledConfig& sample,
                                     const hpo::RungCallback& callback) {
    const nn::ModelSpec spec = make_model_spec(arch, cfg, sample.hidden_size, sample.init_seed);
    nn::TrainResult result =
        nn::train(spec, trial_train_config(sample), train_frame, val_frame, callback);
    const hpo::TrialOutcome outcome{result.best_val_loss, result.epochs_run};
    if (result.epochs_run >= cfg.hpo.max_resource) {
      std::lock_guard<std::mutex> lock(completed_mutex);
      completed.emplace(sample.trial_id, std::move(result));
    }
    return outcome;
  };

  HpoRunResult out;
  out.search = hpo::asha_search(cfg.hpo, trainer);
  out.winner_config = out.search.trials[out.search.best_trial].config;

  const nn::ModelSpec spec =
      make_model_spec(arch, cfg, out.winner_config.hidden_size, out.winner_config.init_seed);
  if (const auto it = completed.find(out.winner_config.trial_id); it != completed.end()) {
    out.winner_train = std::move(it->second);
  } else {
    out.winner_train =
        nn::train(spec, trial_train_config(out.winner_config), train_frame, val_frame);
  }
  out.winner.spec = spec;
  out.winner.norm = out.winner_train.norm;
  out.winner.weights = out.winner_train.best_weights;
  out.winner.config_hash = cfg.config_hash;
  out.winner.train_seed = out.winner_config.train_seed;
  return out;
}

namespace {

std::vector<std::vector<double>> nn_prediction_mps(const nn::Checkpoint& ckpt,
                                                   const SignalFrame& frame,
                                                   double tire_radius) {
  const auto pred_rad =
      nn::predict_frame(ckpt.spec, ckpt.weights, ckpt.norm, frame);
  std::vector<std::vector<double>> out;
  out.reserve(pred_rad.size());
  for (const auto& ch : pred_rad) out.push_back(rot_to_translational(ch, tire_radius));
  return out;
}

}  // namespace

EvaluationOutput evaluate_all(const SignalFrame& test_frame, const ExperimentConfig& cfg,
                              const MethodArtifacts& artifacts) {
  test_frame.validate();
  const double r = cfg.sim_params.tire_radius;
  const double gear = cfg.sim_params.gear_ratio;
  const std::size_t washout = cfg.eval_washout;
  const auto reference = reference_speeds_mps(test_frame, r);
  const auto mask = standstill_mask(reference, test_frame.segments, washout);
  const bool any_standstill = std::count(mask.begin(), mask.end(), true) > 0;

  EvaluationOutput out;
  out.has_standstill = any_standstill;

  // Raw production sensor.
  {
    const std::vector<std::vector<double>> sp = {
        rot_to_translational(test_frame.channel(channels::kWheelLeftSp), r),
        rot_to_translational(test_frame.channel(channels::kWheelRightSp), r)};
    out.methods.push_back(evaluate_method("SP", sp, reference, test_frame.segments, washout));
  }

  const auto eval_filter = [&](const std::string& name, const std::optional<FilterSpec>& spec) {
    if (!spec.has_value()) {
      MethodResult absent;
      absent.method = name;
      absent.present = false;
      out.methods.push_back(std::move(absent));
      return;
    }
    const std::vector<std::vector<double>> pred = {
        filtered_motor_prediction(test_frame, *spec, r, gear)};
    out.methods.push_back(evaluate_method(name, pred, reference, test_frame.segments, washout));
    if (any_standstill) out.standstill_mean_abs[name] = mean_abs_over_mask(pred, mask);
  };
  eval_filter("LPF_causal", artifacts.causal);
  eval_filter("LPF_acausal", artifacts.acausal);
  if (artifacts.acausal_testtuned.has_value())
    eval_filter("LPF_acausal_testtuned", artifacts.acausal_testtuned);

  for (const char* arch : {"lstm", "gru", "tcn"}) {
    std::string label = arch;
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    const auto it = artifacts.models.find(arch);
    if (it == artifacts.models.end()) {
      MethodResult absent;
      absent.method = label;
      absent.present = false;
      out.methods.push_back(std::move(absent));
      continue;
    }
    const auto pred = nn_prediction_mps(it->second, test_frame, r);
    out.methods.push_back(evaluate_method(label, pred, reference, test_frame.segments, washout));
    if (any_standstill) out.standstill_mean_abs[label] = mean_abs_over_mask(pred, mask);
  }

  out.ranking = build_ranking(out.methods);
  return out;
}

OrderingCheck check_method_ordering(const EvaluationOutput& eval, double min_gap,
                                    double min_nn_vs_sp) {
  const auto find = [&](const std::string& name) -> const MethodResult* {
    for (const auto& m : eval.methods)
      if (m.method == name && m.present) return &m;
    return nullptr;
  };
  const MethodResult* sp = find("SP");
  const MethodResult* causal = find("LPF_causal");
  const MethodResult* acausal = find("LPF_acausal");
  const MethodResult* best_nn = nullptr;
  for (const char* name : {"LSTM", "GRU", "TCN"}) {
    const MethodResult* m = find(name);
    if (m && (!best_nn || m->overall_mae < best_nn->overall_mae)) best_nn = m;
  }

  OrderingCheck check;
  if (!sp || !causal || !acausal || !best_nn) {
    check.detail = "missing method artifacts for the ordering check";
    return check;
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "NN(%s)=%.5f acausal=%.5f causal=%.5f SP=%.5f [m/s]",
                best_nn->method.c_str(), best_nn->overall_mae, acausal->overall_mae,
                causal->overall_mae, sp->overall_mae);
  check.detail = buf;

  const auto gap_ok = [&](double better, double worse) {
    return better < worse && (worse - better) / worse >= min_gap;
  };
  const bool ordering = gap_ok(best_nn->overall_mae, acausal->overall_mae) &&
                        gap_ok(acausal->overall_mae, causal->overall_mae) &&
                        gap_ok(causal->overall_mae, sp->overall_mae);
  const bool nn_reduction =
      (sp->overall_mae - best_nn->overall_mae) / sp->overall_mae >= min_nn_vs_sp;
  check.ok = ordering && nn_reduction;
  if (!ordering) check.detail += " | ordering gap below threshold";
  if (!nn_reduction) check.detail += " | NN reduction vs SP below threshold";
  return check;
}

TimeSeriesExport export_timeseries(const SignalFrame& test_frame, const ExperimentConfig& cfg,
                                   const MethodArtifacts& artifacts,
                                   const std::string& maneuver_id) {
  const std::vector<std::string> ids = {maneuver_id};
  const SignalFrame sub = select_maneuvers(test_frame, ids);
  require(sub.length() > 0, "missing-maneuver", maneuver_id);
  const double r = cfg.sim_params.tire_radius;
  const double gear = cfg.sim_params.gear_ratio;
  const std::size_t n = sub.length();
  constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

  TimeSeriesExport series;
  series.t.resize(n);
  for (std::size_t i = 0; i < n; ++i) series.t[i] = sub.time_at(i);

  const auto& sp_l = sub.channel(channels::kWheelLeftSp);
  const auto& sp_r = sub.channel(channels::kWheelRightSp);
  const auto& ref_l = sub.channel(channels::kWheelLeftRef);
  const auto& ref_r = sub.channel(channels::kWheelRightRef);
  const auto& motor = sub.channel(channels::kMotorSp);
  series.v_sp.resize(n);
  series.v_em.resize(n);
  series.v_ref.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    series.v_sp[i] = 0.5 * (sp_l[i] + sp_r[i]) * r;
    series.v_em[i] = motor[i] / gear * r;
    series.v_ref[i] = 0.5 * (ref_l[i] + ref_r[i]) * r;
  }

  if (artifacts.acausal.has_value()) {
    series.v_lpf_acausal = filtered_motor_prediction(sub, *artifacts.acausal, r, gear);
  } else {
    series.v_lpf_acausal.assign(n, kAbsent);
  }
  if (const auto it = artifacts.models.find("gru"); it != artifacts.models.end()) {
    const auto pred = nn_prediction_mps(it->second, sub, r);
    series.v_gru.resize(n);
    for (std::size_t i = 0; i < n; ++i) series.v_gru[i] = 0.5 * (pred[0][i] + pred[1][i]);
  } else {
    series.v_gru.assign(n, kAbsent);
  }
  return series;
}

std::vector<SweepRow> hidden_size_sweep(nn::Arch arch, const std::vector<std::size_t>& sizes,
                                        std::size_t repeats, const ExperimentConfig& cfg,
                                        const SignalFrame& train_frame,
                                        const SignalFrame& val_frame) {
  require(!sizes.empty() && repeats >= 1, "invalid-sweep");
  const ModelTrainSection& section = cfg.train_section(arch);

  std::vector<SweepRow> rows;
  rows.reserve(sizes.size() * repeats);
  for (const std::size_t hidden : sizes) {
    for (std::size_t rep = 0; rep < repeats; ++rep) {
      SweepRow row;
      row.hidden_size = hidden;
      row.repeat = rep;
      row.seed = mix_seed(section.train.seed, hidden * 1000 + rep);
      const nn::ModelSpec spec = make_model_spec(arch, cfg, hidden, mix_seed(row.seed, 1));
      row.flops = nn::flops_per_step(spec);
      nn::TrainConfig tc = section.train;
      tc.seed = mix_seed(row.seed, 2);
      try {
        const nn::TrainResult result = nn::train(spec, tc, train_frame, val_frame);
        row.val_loss = result.best_val_loss;
      } catch (const Error& e) {
        if (e.code() != "diverged") throw;
        row.val_loss = hpo::kLargeLoss;
        row.diverged = true;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path,
                     const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "io-error", "cannot open for writing: " + path);
  for (const auto& line : comments) out << "# " << line << "\n";
  out << "hidden_size,repeat,seed,val_loss,diverged,flops_per_step\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", row.val_loss);
    out << row.hidden_size << ',' << row.repeat << ',' << row.seed << ',' << buf << ','
        << (row.diverged ? 1 : 0) << ',' << row.flops << '\n';
  }
  require(out.good(), "io-error", "write failed: " + path);
}

}  // namespace vws
