#include "vws/nn/model.hpp"

#include <cmath>

#include "vws/error.hpp"
#include "vws/rng.hpp"

namespace vws::nn {

std::string arch_name(Arch arch) {
  switch (arch) {
    case Arch::kGru: return "gru";
    case Arch::kLstm: return "lstm";
    case Arch::kTcn: return "tcn";
  }
  return "?";
}

Arch arch_from_name(std::string_view name) {
  if (name == "gru") return Arch::kGru;
  if (name == "lstm") return Arch::kLstm;
  if (name == "tcn") return Arch::kTcn;
  fail("unknown-arch", std::string(name));
}

void ModelSpec::validate() const {
  require(input_size >= 1 && output_size >= 1 && hidden_size >= 1, "invalid-spec");
  if (arch == Arch::kTcn) require(tcn_layers >= 1 && kernel_size >= 2, "invalid-spec");
}

std::size_t ModelSpec::receptive_field() const {
  if (arch != Arch::kTcn) return 0;
  return (kernel_size - 1) * ((std::size_t{1} << tcn_layers) - 1) + 1;
}

const WeightBlock& WeightLayout::block(std::string_view name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b;
  fail("weight-shape-mismatch", "unknown block " + std::string(name));
}

WeightLayout weight_layout(const ModelSpec& spec) {
  spec.validate();
  WeightLayout layout;
  const auto push = [&](std::string name, std::size_t rows, std::size_t cols) {
    layout.blocks.push_back({std::move(name), layout.total, rows, cols});
    layout.total += rows * cols;
  };
  const std::size_t h = spec.hidden_size;
  const std::size_t x = spec.input_size;
  const std::size_t o = spec.output_size;

  switch (spec.arch) {
    case Arch::kGru:
      for (const char* g : {"w_z", "w_r", "w_h"}) push(g, h, x);
      for (const char* g : {"u_z", "u_r", "u_h"}) push(g, h, h);
      for (const char* g : {"b_z", "b_r", "b_h"}) push(g, h, 1);
      break;
    case Arch::kLstm:
      for (const char* g : {"w_i", "w_f", "w_o", "w_g"}) push(g, h, x);
      for (const char* g : {"u_i", "u_f", "u_o", "u_g"}) push(g, h, h);
      for (const char* g : {"b_i", "b_f", "b_o", "b_g"}) push(g, h, 1);
      break;
    case Arch::kTcn:
      for (std::size_t l = 0; l < spec.tcn_layers; ++l) {
        const std::size_t c_in = l == 0 ? x : h;
        push("conv" + std::to_string(l) + "_w", h, c_in * spec.kernel_size);
        push("conv" + std::to_string(l) + "_b", h, 1);
        if (c_in != h) push("proj" + std::to_string(l) + "_w", h, c_in);
      }
      break;
  }
  push("head_w", o, h);
  push("head_b", o, 1);
  return layout;
}

namespace {

// Modified Gram-Schmidt on a Gaussian matrix; plenty orthogonal for
// initialization purposes and deterministic for a fixed stream.
void fill_orthogonal(double* m, std::size_t n, Rng& rng) {
  std::vector<double> a(n * n);
  for (auto& v : a) v = rng.gaussian();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += a[k * n + i] * a[k * n + j];
      for (std::size_t k = 0; k < n; ++k) a[k * n + j] -= dot * a[k * n + i];
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) norm += a[k * n + j] * a[k * n + j];
    norm = std::sqrt(std::max(norm, 1e-300));
    for (std::size_t k = 0; k < n; ++k) a[k * n + j] /= norm;
  }
  std::copy(a.begin(), a.end(), m);
}

void fill_uniform_fan_in(double* m, std::size_t count, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (std::size_t i = 0; i < count; ++i) m[i] = rng.uniform(-bound, bound);
}

}  // namespace

std::vector<double> init_weights(const ModelSpec& spec) {
  const WeightLayout layout = weight_layout(spec);
  std::vector<double> w(layout.total, 0.0);
  Rng rng(mix_seed(spec.seed, 0x1417));

  for (const auto& block : layout.blocks) {
    double* dst = w.data() + block.offset;
    if (block.cols == 1) continue;  // biases stay zero
    if (block.name[0] == 'u' && block.rows == block.cols) {
      fill_orthogonal(dst, block.rows, rng);
    } else {
      fill_uniform_fan_in(dst, block.size(), block.cols, rng);
    }
  }
  return w;
}

std::size_t flops_per_step(const ModelSpec& spec) {
  spec.validate();
  const std::size_t h = spec.hidden_size;
  const std::size_t x = spec.input_size;
  const std::size_t o = spec.output_size;
  switch (spec.arch) {
    case Arch::kGru:
      // 3 input + 3 recurrent matvecs at 2 FLOPs per multiply-add, 15 h for
      // gates/activations/cell blending, plus the linear head.
      return 2 * 3 * (h * x + h * h) + 15 * h + 2 * h * o;
    case Arch::kLstm:
      // 4 gate matvec pairs, 20 h for biases/activations/cell updates.
      return 2 * 4 * (h * x + h * h) + 20 * h + 2 * h * o;
    case Arch::kTcn: {
      // Per layer: dilated conv multiply-adds, bias + ReLU + residual add,
      // plus the 1x1 projection when channel counts differ.
      std::size_t total = 0;
      for (std::size_t l = 0; l < spec.tcn_layers; ++l) {
        const std::size_t c_in = l == 0 ? x : h;
        total += 2 * spec.kernel_size * c_in * h + 3 * h;
        if (c_in != h) total += 2 * c_in * h;
      }
      return total + 2 * h * o;
    }
  }
  return 0;
}

double ecu_budget(std::size_t flops, double rate_hz, double clock_hz, double flops_per_cycle) {
  require(flops > 0 && rate_hz > 0.0 && clock_hz > 0.0 && flops_per_cycle > 0.0,
          "invalid-budget");
  return static_cast<double>(flops) * rate_hz / (clock_hz * flops_per_cycle);
}

namespace detail {

void gru_forward(const ModelSpec&, std::span<const double>, SeqView, Sequence&);
double gru_backward(const ModelSpec&, std::span<const double>, SeqView, SeqView, std::size_t,
                    std::span<double>);
void lstm_forward(const ModelSpec&, std::span<const double>, SeqView, Sequence&);
double lstm_backward(const ModelSpec&, std::span<const double>, SeqView, SeqView, std::size_t,
                     std::span<double>);
void tcn_forward(const ModelSpec&, std::span<const double>, SeqView, Sequence&);
double tcn_backward(const ModelSpec&, std::span<const double>, SeqView, SeqView, std::size_t,
                    std::span<double>);

}  // namespace detail

namespace {

void check_shapes(const ModelSpec& spec, std::span<const double> weights, const SeqView& x) {
  spec.validate();
  require(weights.size() == weight_layout(spec).total, "weight-shape-mismatch",
          "weights " + std::to_string(weights.size()));
  require(x.dim == spec.input_size, "weight-shape-mismatch", "input dim");
  require(x.steps >= 1, "empty-input");
}

}  // namespace

void model_forward(const ModelSpec& spec, std::span<const double> weights, SeqView x,
                   Sequence& y) {
  check_shapes(spec, weights, x);
  y = Sequence::zeros(x.steps, spec.output_size);
  switch (spec.arch) {
    case Arch::kGru: detail::gru_forward(spec, weights, x, y); break;
    case Arch::kLstm: detail::lstm_forward(spec, weights, x, y); break;
    case Arch::kTcn: detail::tcn_forward(spec, weights, x, y); break;
  }
}

double model_backward(const ModelSpec& spec, std::span<const double> weights, SeqView x,
                      SeqView target, std::size_t washout, std::span<double> grad) {
  check_shapes(spec, weights, x);
  require(target.steps == x.steps, "target-length-mismatch");
  require(target.dim == spec.output_size, "target-length-mismatch", "target dim");
  require(washout < x.steps, "invalid-washout");
  require(grad.size() == weights.size(), "weight-shape-mismatch", "grad size");
  switch (spec.arch) {
    case Arch::kGru: return detail::gru_backward(spec, weights, x, target, washout, grad);
    case Arch::kLstm: return detail::lstm_backward(spec, weights, x, target, washout, grad);
    case Arch::kTcn: return detail::tcn_backward(spec, weights, x, target, washout, grad);
  }
  return 0.0;
}

}  // namespace vws::nn
