#include "vws/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "vws/error.hpp"

namespace vws::nn {

namespace {

constexpr char kMagic[4] = {'V', 'W', 'S', 'C'};

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_vec(std::ostream& out, const std::vector<double>& v) {
  put_u64(out, v.size());
  for (const double x : v) put_f64(out, x);
}

std::vector<double> get_vec(std::istream& in) {
  const std::uint64_t n = get_u64(in);
  require(n < (1ull << 32), "checkpoint-corrupt", "implausible vector length");
  std::vector<double> v(n);
  for (auto& x : v) x = get_f64(in);
  return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  ckpt.spec.validate();
  require(ckpt.weights.size() == weight_layout(ckpt.spec).total, "weight-shape-mismatch",
          "weight count does not match the spec layout");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "io-error", "cannot open for writing: " + path);

  out.write(kMagic, 4);
  put_u32(out, ckpt.format_version);
  put_u32(out, static_cast<std::uint32_t>(ckpt.spec.arch));
  put_u64(out, ckpt.spec.input_size);
  put_u64(out, ckpt.spec.output_size);
  put_u64(out, ckpt.spec.hidden_size);
  put_u64(out, ckpt.spec.tcn_layers);
  put_u64(out, ckpt.spec.kernel_size);
  put_u64(out, ckpt.spec.seed);
  put_u64(out, ckpt.config_hash);
  put_u64(out, ckpt.train_seed);
  put_vec(out, ckpt.norm.in_mean);
  put_vec(out, ckpt.norm.in_std);
  put_vec(out, ckpt.norm.out_mean);
  put_vec(out, ckpt.norm.out_std);
  put_vec(out, ckpt.weights);
  require(out.good(), "io-error", "write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "io-error", "cannot open: " + path);

  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, kMagic, 4) == 0, "checkpoint-corrupt", "bad magic");

  Checkpoint ckpt;
  ckpt.format_version = get_u32(in);
  require(ckpt.format_version == 1, "checkpoint-corrupt",
          "unsupported format version " + std::to_string(ckpt.format_version));
  const auto arch = get_u32(in);
  require(arch <= 2, "checkpoint-corrupt", "bad arch tag");
  ckpt.spec.arch = static_cast<Arch>(arch);
  ckpt.spec.input_size = get_u64(in);
  ckpt.spec.output_size = get_u64(in);
  ckpt.spec.hidden_size = get_u64(in);
  ckpt.spec.tcn_layers = get_u64(in);
  ckpt.spec.kernel_size = get_u64(in);
  ckpt.spec.seed = get_u64(in);
  ckpt.config_hash = get_u64(in);
  ckpt.train_seed = get_u64(in);
  ckpt.norm.in_mean = get_vec(in);
  ckpt.norm.in_std = get_vec(in);
  ckpt.norm.out_mean = get_vec(in);
  ckpt.norm.out_std = get_vec(in);
  ckpt.weights = get_vec(in);
  require(in.good(), "checkpoint-corrupt", "truncated file");
  require(ckpt.weights.size() == weight_layout(ckpt.spec).total, "checkpoint-corrupt",
          "weight count does not match the spec layout");
  return ckpt;
}

}  // namespace vws::nn
