#include "vws/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

#include "vws/error.hpp"

namespace vws {

using nlohmann::json;

namespace {

// Rejects keys that no reader claimed; errors carry the JSON pointer path.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j.is_object(), "config-error", path_ + " must be an object");
  }

  ~StrictObject() = default;

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) { return j_.at(key); }

  template <typename T>
  void read(const std::string& key, T& value) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      value = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      fail("config-error", path_ + "/" + key + ": " + e.what());
    }
  }

  void finish() {
    for (const auto& [key, _] : j_.items())
      require(seen_.count(key) > 0, "config-error", "unknown key " + path_ + "/" + key);
  }

  std::string path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_sim_params(const json& j, const std::string& path, DrivetrainParams& p) {
  StrictObject obj(j, path);
  obj.read("motor_inertia", p.motor_inertia);
  obj.read("wheel_inertia", p.wheel_inertia);
  obj.read("shaft_stiffness", p.shaft_stiffness);
  obj.read("shaft_damping", p.shaft_damping);
  obj.read("backlash_half", p.backlash_half);
  obj.read("gear_ratio", p.gear_ratio);
  obj.read("tire_radius", p.tire_radius);
  obj.read("vehicle_mass", p.vehicle_mass);
  obj.read("track_width", p.track_width);
  obj.read("roll_resist", p.roll_resist);
  obj.read("drag_coeff", p.drag_coeff);
  obj.finish();
}

void parse_encoder(const json& j, const std::string& path, EncoderConfig& cfg) {
  StrictObject obj(j, path);
  obj.read("ticks_per_rev", cfg.ticks_per_rev);
  if (obj.has("mode")) {
    const std::string mode = obj.at("mode").get<std::string>();
    if (mode == "frequency_count") {
      cfg.mode = EncoderMode::kFrequencyCount;
    } else if (mode == "period_measure") {
      cfg.mode = EncoderMode::kPeriodMeasure;
    } else {
      fail("config-error", path + "/mode: unknown mode " + mode);
    }
  }
  obj.read("window", cfg.window);
  obj.read("min_speed_timeout", cfg.min_speed_timeout);
  obj.read("quantize_output", cfg.quantize_output);
  obj.finish();
}

void parse_train_section(const json& j, const std::string& path, ModelTrainSection& section) {
  StrictObject obj(j, path);
  obj.read("window", section.train.window);
  obj.read("washout", section.train.washout);
  obj.read("batch_size", section.train.batch_size);
  obj.read("max_epochs", section.train.max_epochs);
  obj.read("lr_max", section.train.lr_max);
  obj.read("lr_min", section.train.lr_min);
  obj.read("beta1", section.train.beta1);
  obj.read("beta2", section.train.beta2);
  obj.read("weight_decay", section.train.weight_decay);
  obj.read("seed", section.train.seed);
  obj.read("hidden_size", section.hidden_size);
  obj.read("tcn_layers", section.tcn_layers);
  obj.read("kernel_size", section.kernel_size);
  obj.finish();
}

ExperimentConfig parse_config_json(const json& root) {
  ExperimentConfig cfg = default_config();
  StrictObject top(root, "");

  if (top.has("sim")) {
    StrictObject sim(top.at("sim"), "/sim");
    if (sim.has("params")) parse_sim_params(sim.at("params"), "/sim/params", cfg.sim_params);
    sim.read("suite_seed", cfg.suite_seed);
    sim.read("sim_seed", cfg.sim_seed);
    sim.read("duration_min", cfg.duration_min);
    sim.read("dt", cfg.dt);
    sim.finish();
  }
  if (top.has("sensors")) {
    StrictObject sensors(top.at("sensors"), "/sensors");
    if (sensors.has("sp")) parse_encoder(sensors.at("sp"), "/sensors/sp", cfg.sp_encoder);
    if (sensors.has("ref")) parse_encoder(sensors.at("ref"), "/sensors/ref", cfg.ref_encoder);
    sensors.read("motor_noise_std", cfg.motor_noise_std);
    sensors.read("seed", cfg.sensor_seed);
    sensors.finish();
  }
  if (top.has("split")) {
    StrictObject split(top.at("split"), "/split");
    split.read("fractions", cfg.split_fractions);
    split.read("seed", cfg.split_seed);
    split.finish();
  }
  if (top.has("filters")) {
    StrictObject filters(top.at("filters"), "/filters");
    filters.read("order_min", cfg.filter_ranges.order_min);
    filters.read("order_max", cfg.filter_ranges.order_max);
    filters.read("cutoff_min_hz", cfg.filter_ranges.cutoff_min_hz);
    filters.read("cutoff_max_hz", cfg.filter_ranges.cutoff_max_hz);
    filters.read("shift_min", cfg.filter_ranges.shift_min);
    filters.read("shift_max", cfg.filter_ranges.shift_max);
    if (filters.has("pso")) {
      StrictObject pso(filters.at("pso"), "/filters/pso");
      pso.read("particles", cfg.pso.particles);
      pso.read("iterations", cfg.pso.iterations);
      pso.read("seed", cfg.pso.seed);
      pso.finish();
    }
    filters.finish();
  }
  if (top.has("train")) {
    StrictObject train(top.at("train"), "/train");
    if (train.has("gru")) parse_train_section(train.at("gru"), "/train/gru", cfg.train_gru);
    if (train.has("lstm")) parse_train_section(train.at("lstm"), "/train/lstm", cfg.train_lstm);
    if (train.has("tcn")) parse_train_section(train.at("tcn"), "/train/tcn", cfg.train_tcn);
    train.finish();
  }
  if (top.has("hpo")) {
    StrictObject hpo_obj(top.at("hpo"), "/hpo");
    hpo_obj.read("max_resource", cfg.hpo.max_resource);
    hpo_obj.read("min_resource", cfg.hpo.min_resource);
    hpo_obj.read("reduction_factor", cfg.hpo.reduction_factor);
    hpo_obj.read("num_samples", cfg.hpo.num_samples);
    hpo_obj.read("seed", cfg.hpo.seed);
    hpo_obj.read("workers", cfg.hpo.workers);
    hpo_obj.read("hidden_min", cfg.hpo.hidden_min);
    hpo_obj.read("hidden_max", cfg.hpo.hidden_max);
    hpo_obj.read("lr_min", cfg.hpo.lr_min);
    hpo_obj.read("lr_max", cfg.hpo.lr_max);
    hpo_obj.read("batch_min", cfg.hpo.batch_min);
    hpo_obj.read("batch_max", cfg.hpo.batch_max);
    hpo_obj.finish();
  }
  if (top.has("eval")) {
    StrictObject eval(top.at("eval"), "/eval");
    eval.read("timeseries_maneuvers", cfg.timeseries_maneuvers);
    eval.read("washout", cfg.eval_washout);
    eval.finish();
  }
  top.finish();

  cfg.config_hash = hash_config(cfg);
  return cfg;
}

void apply_seed_override(ExperimentConfig& cfg) {
  const char* env = std::getenv("VW_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  const auto seed = static_cast<std::uint64_t>(std::strtoull(env, &end, 10));
  require(end && *end == '\0', "config-error", "VW_SEED must be an unsigned integer");
  cfg.suite_seed = seed;
  cfg.sim_seed = seed;
  cfg.sensor_seed = seed;
  cfg.split_seed = seed;
  cfg.pso.seed = seed;
  cfg.train_gru.train.seed = seed;
  cfg.train_lstm.train.seed = seed;
  cfg.train_tcn.train.seed = seed;
  cfg.hpo.seed = seed;
  cfg.config_hash = hash_config(cfg);
}

json encoder_to_json(const EncoderConfig& cfg) {
  return json{{"ticks_per_rev", cfg.ticks_per_rev},
              {"mode", cfg.mode == EncoderMode::kFrequencyCount ? "frequency_count"
                                                                : "period_measure"},
              {"window", cfg.window},
              {"min_speed_timeout", cfg.min_speed_timeout},
              {"quantize_output", cfg.quantize_output}};
}

json train_section_to_json(const ModelTrainSection& s) {
  return json{{"window", s.train.window},
              {"washout", s.train.washout},
              {"batch_size", s.train.batch_size},
              {"max_epochs", s.train.max_epochs},
              {"lr_max", s.train.lr_max},
              {"lr_min", s.train.lr_min},
              {"beta1", s.train.beta1},
              {"beta2", s.train.beta2},
              {"weight_decay", s.train.weight_decay},
              {"seed", s.train.seed},
              {"hidden_size", s.hidden_size},
              {"tcn_layers", s.tcn_layers},
              {"kernel_size", s.kernel_size}};
}

}  // namespace

const ModelTrainSection& ExperimentConfig::train_section(nn::Arch arch) const {
  switch (arch) {
    case nn::Arch::kGru: return train_gru;
    case nn::Arch::kLstm: return train_lstm;
    case nn::Arch::kTcn: return train_tcn;
  }
  fail("unknown-arch");
}

ModelTrainSection& ExperimentConfig::train_section(nn::Arch arch) {
  switch (arch) {
    case nn::Arch::kGru: return train_gru;
    case nn::Arch::kLstm: return train_lstm;
    case nn::Arch::kTcn: return train_tcn;
  }
  fail("unknown-arch");
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.sp_encoder = EncoderConfig{43, EncoderMode::kFrequencyCount, 0.1, 0.5, 0.0};
  cfg.ref_encoder = EncoderConfig{4096, EncoderMode::kPeriodMeasure, 0.1, 0.2, 0.0};
  cfg.train_gru.train.seed = 606;
  cfg.train_lstm.train.seed = 616;
  cfg.train_tcn.train.seed = 626;
  cfg.hpo.seed = 707;
  cfg.pso.seed = 505;
  cfg.config_hash = hash_config(cfg);
  return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json root;
  root["sim"] = {{"params",
                  {{"motor_inertia", cfg.sim_params.motor_inertia},
                   {"wheel_inertia", cfg.sim_params.wheel_inertia},
                   {"shaft_stiffness", cfg.sim_params.shaft_stiffness},
                   {"shaft_damping", cfg.sim_params.shaft_damping},
                   {"backlash_half", cfg.sim_params.backlash_half},
                   {"gear_ratio", cfg.sim_params.gear_ratio},
                   {"tire_radius", cfg.sim_params.tire_radius},
                   {"vehicle_mass", cfg.sim_params.vehicle_mass},
                   {"track_width", cfg.sim_params.track_width},
                   {"roll_resist", cfg.sim_params.roll_resist},
                   {"drag_coeff", cfg.sim_params.drag_coeff}}},
                 {"suite_seed", cfg.suite_seed},
                 {"sim_seed", cfg.sim_seed},
                 {"duration_min", cfg.duration_min},
                 {"dt", cfg.dt}};
  root["sensors"] = {{"sp", encoder_to_json(cfg.sp_encoder)},
                     {"ref", encoder_to_json(cfg.ref_encoder)},
                     {"motor_noise_std", cfg.motor_noise_std},
                     {"seed", cfg.sensor_seed}};
  root["split"] = {{"fractions", cfg.split_fractions}, {"seed", cfg.split_seed}};
  root["filters"] = {{"order_min", cfg.filter_ranges.order_min},
                     {"order_max", cfg.filter_ranges.order_max},
                     {"cutoff_min_hz", cfg.filter_ranges.cutoff_min_hz},
                     {"cutoff_max_hz", cfg.filter_ranges.cutoff_max_hz},
                     {"shift_min", cfg.filter_ranges.shift_min},
                     {"shift_max", cfg.filter_ranges.shift_max},
                     {"pso",
                      {{"particles", cfg.pso.particles},
                       {"iterations", cfg.pso.iterations},
                       {"seed", cfg.pso.seed}}}};
  root["train"] = {{"gru", train_section_to_json(cfg.train_gru)},
                   {"lstm", train_section_to_json(cfg.train_lstm)},
                   {"tcn", train_section_to_json(cfg.train_tcn)}};
  root["hpo"] = {{"max_resource", cfg.hpo.max_resource},
                 {"min_resource", cfg.hpo.min_resource},
                 {"reduction_factor", cfg.hpo.reduction_factor},
                 {"num_samples", cfg.hpo.num_samples},
                 {"seed", cfg.hpo.seed},
                 {"workers", cfg.hpo.workers},
                 {"hidden_min", cfg.hpo.hidden_min},
                 {"hidden_max", cfg.hpo.hidden_max},
                 {"lr_min", cfg.hpo.lr_min},
                 {"lr_max", cfg.hpo.lr_max},
                 {"batch_min", cfg.hpo.batch_min},
                 {"batch_max", cfg.hpo.batch_max}};
  root["eval"] = {{"timeseries_maneuvers", cfg.timeseries_maneuvers},
                  {"washout", cfg.eval_washout}};
  return root.dump();
}

std::uint64_t hash_config(const ExperimentConfig& cfg) {
  const std::string text = config_to_json_text(cfg);
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

ExperimentConfig parse_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    fail("config-error", e.what());
  }
  ExperimentConfig cfg = parse_config_json(root);
  apply_seed_override(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) {
    ExperimentConfig cfg = default_config();
    apply_seed_override(cfg);
    return cfg;
  }
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "config-error", "cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

std::vector<std::string> provenance_comments(const ExperimentConfig& cfg) {
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(cfg.config_hash));
  std::vector<std::string> comments;
  comments.push_back(std::string("config_hash: ") + hash_hex);
  comments.push_back("seeds: suite=" + std::to_string(cfg.suite_seed) +
                     " sim=" + std::to_string(cfg.sim_seed) +
                     " sensors=" + std::to_string(cfg.sensor_seed) +
                     " split=" + std::to_string(cfg.split_seed) +
                     " pso=" + std::to_string(cfg.pso.seed) +
                     " hpo=" + std::to_string(cfg.hpo.seed));
  return comments;
}

void save_filter_spec(const FilterSpec& spec, double mae, const std::string& label,
                      const std::string& path, std::uint64_t config_hash) {
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash));
  json j{{"label", label},
         {"order", spec.order},
         {"cutoff_hz", spec.cutoff_hz},
         {"mae", mae},
         {"config_hash", hash_hex}};
  if (spec.acausal) j["shift"] = spec.shift;
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "io-error", "cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  require(out.good(), "io-error", "write failed: " + path);
}

LoadedFilterSpec load_filter_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "io-error", "cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("config-error", path + ": " + e.what());
  }
  LoadedFilterSpec loaded;
  try {
    loaded.label = j.at("label").get<std::string>();
    loaded.spec.order = j.at("order").get<int>();
    loaded.spec.cutoff_hz = j.at("cutoff_hz").get<double>();
    loaded.mae = j.at("mae").get<double>();
    if (j.contains("shift")) {
      loaded.spec.shift = j.at("shift").get<int>();
      loaded.spec.acausal = true;
    }
  } catch (const json::exception& e) {
    fail("config-error", path + ": " + e.what());
  }
  return loaded;
}

}  // namespace vws
