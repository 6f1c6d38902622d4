#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "vws/nn/checkpoint.hpp"
#include "vws/signal.hpp"

#ifndef VWS_CLI_PATH
#define VWS_CLI_PATH "./vws"
#endif

namespace {

int run_cli(const std::string& args) {
  const std::string command = std::string(VWS_CLI_PATH) + " " + args + " > cli_stdout.txt 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string operator/(const char* leaf) const { return (path / leaf).string(); }
};

}  // namespace

TEST_CASE("help exits zero") { CHECK(run_cli("--help") == 0); }

TEST_CASE("simulate writes a schema-valid CSV with the expected row count") {
  TempDir dir("vws_cli_sim");
  const std::string out = dir / "data.csv";
  REQUIRE(run_cli("simulate --duration-min 1 --out " + out) == 0);

  const vws::SignalFrame frame = vws::read_dataset_csv(out);
  CHECK(frame.sample_rate == 50.0);
  // 60 s at 50 Hz, give or take one sample of rounding per maneuver.
  CHECK(frame.length() >= 3000 - 42);
  CHECK(frame.length() <= 3000 + 42);
  CHECK(frame.maneuver_ids().size() >= 12);

  // Byte-identical reproduction on a second run.
  const std::string out2 = dir / "data2.csv";
  REQUIRE(run_cli("simulate --duration-min 1 --out " + out2) == 0);
  CHECK(read_file(out) == read_file(out2));
}

TEST_CASE("unknown config keys exit with the config error code and name the key") {
  TempDir dir("vws_cli_cfg");
  const std::string cfg = dir / "bad.json";
  {
    std::ofstream out(cfg);
    out << R"({"sim": {"durations_min": 3}})";
  }
  CHECK(run_cli("simulate --config " + cfg + " --out " + (dir / "x.csv")) == 2);
  CHECK(read_file("cli_stdout.txt").find("durations_min") != std::string::npos);
  std::remove("cli_stdout.txt");
}

TEST_CASE("schema-violating data exits with the data error code") {
  TempDir dir("vws_cli_schema");
  const std::string bad = dir / "bad.csv";
  {
    std::ofstream out(bad);
    out << "t,omega_RL_SP\n0,1\n";
  }
  CHECK(run_cli("tune-filter --data " + bad + " --variant causal --out " + (dir / "f.json")) ==
        3);
  std::remove("cli_stdout.txt");
}

TEST_CASE("missing subcommand or option is a usage error") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("simulate") == 2);
  std::remove("cli_stdout.txt");
}

TEST_CASE("flops reports the documented GRU count and ECU utilization") {
  TempDir dir("vws_cli_flops");
  const std::string ckpt = dir / "gru.ckpt";
  {
    vws::nn::Checkpoint c;
    c.spec.arch = vws::nn::Arch::kGru;
    c.spec.input_size = 5;
    c.spec.output_size = 2;
    c.spec.hidden_size = 32;
    c.norm.in_mean.assign(5, 0.0);
    c.norm.in_std.assign(5, 1.0);
    c.norm.out_mean.assign(2, 0.0);
    c.norm.out_std.assign(2, 1.0);
    c.weights = vws::nn::init_weights(c.spec);
    vws::nn::save_checkpoint(c, ckpt);
  }
  REQUIRE(run_cli("flops --ckpt " + ckpt + " --rate 50 --clock 300e6") == 0);
  const std::string out = read_file("cli_stdout.txt");
  CHECK(out.find("7712 FLOPs/step") != std::string::npos);
  CHECK(out.find("0.1285%") != std::string::npos);
  std::remove("cli_stdout.txt");
}

TEST_CASE("hpo writes one record per trial plus the event log and winner") {
  TempDir dir("vws_cli_hpo");
  const std::string data = dir / "data.csv";
  const std::string cfg = dir / "cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({
      "train": {"gru": {"window": 100, "washout": 20, "max_epochs": 2}},
      "hpo": {"num_samples": 2, "min_resource": 1, "max_resource": 2,
              "hidden_min": 4, "hidden_max": 8, "batch_min": 8, "batch_max": 16}
    })";
  }
  REQUIRE(run_cli("simulate --config " + cfg + " --duration-min 3 --out " + data) == 0);
  REQUIRE(run_cli("hpo --config " + cfg + " --data " + data + " --arch gru --out " +
                  (dir / "trials")) == 0);

  const std::string trials = read_file((dir / "trials") + std::string("/trials.json"));
  CHECK(trials.find("\"trial\": 0") != std::string::npos);
  CHECK(trials.find("\"trial\": 1") != std::string::npos);
  CHECK(std::filesystem::exists((dir / "trials") + std::string("/events.ndjson")));
  CHECK(std::filesystem::exists((dir / "trials") + std::string("/best.ckpt")));
  const vws::nn::Checkpoint best =
      vws::nn::load_checkpoint((dir / "trials") + std::string("/best.ckpt"));
  CHECK(best.spec.hidden_size >= 4);
  CHECK(best.spec.hidden_size <= 8);
  std::remove("cli_stdout.txt");
}
