#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vws::nn {

enum class Arch { kGru, kLstm, kTcn };

std::string arch_name(Arch arch);
Arch arch_from_name(std::string_view name);

struct ModelSpec {
  Arch arch = Arch::kGru;
  std::size_t input_size = 5;
  std::size_t output_size = 2;
  std::size_t hidden_size = 32;  // recurrent units, or TCN channels
  std::size_t tcn_layers = 6;    // TCN only
  std::size_t kernel_size = 3;   // TCN only
  std::uint64_t seed = 0;

  void validate() const;

  // (k - 1) (2^L - 1) + 1 for the TCN; recurrent models see the whole past.
  std::size_t receptive_field() const;
};

// Row-major [step][dim] buffer.
struct Sequence {
  std::size_t steps = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  static Sequence zeros(std::size_t steps, std::size_t dim) {
    return Sequence{steps, dim, std::vector<double>(steps * dim, 0.0)};
  }
  double* row(std::size_t t) { return values.data() + t * dim; }
  const double* row(std::size_t t) const { return values.data() + t * dim; }
};

// Borrowed window over a Sequence (contiguous rows).
struct SeqView {
  std::size_t steps = 0;
  std::size_t dim = 0;
  const double* data = nullptr;

  SeqView() = default;
  SeqView(const Sequence& s) : steps(s.steps), dim(s.dim), data(s.values.data()) {}
  SeqView(const Sequence& s, std::size_t start, std::size_t len)
      : steps(len), dim(s.dim), data(s.values.data() + start * s.dim) {}
  const double* row(std::size_t t) const { return data + t * dim; }
};

// Named, contiguous, non-overlapping slices covering the flat weight vector.
struct WeightBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;  // 1 for bias vectors
  std::size_t size() const { return rows * cols; }
};

struct WeightLayout {
  std::vector<WeightBlock> blocks;
  std::size_t total = 0;
  const WeightBlock& block(std::string_view name) const;
};

WeightLayout weight_layout(const ModelSpec& spec);

// Orthogonal recurrent matrices, uniform(+-1/sqrt(fan_in)) input and head
// matrices, zero biases; seeded from spec.seed.
std::vector<double> init_weights(const ModelSpec& spec);

// y gets one output row per input step; the map is causal for all three
// architectures.
void model_forward(const ModelSpec& spec, std::span<const double> weights, SeqView x, Sequence& y);

// MSE over steps >= washout, mean over steps and output dims. Gradients
// accumulate into grad (callers zero it for a fresh gradient). Returns the
// loss.
double model_backward(const ModelSpec& spec, std::span<const double> weights, SeqView x,
                      SeqView target, std::size_t washout, std::span<double> grad);

// Analytic per-timestep cost of one forward pass, by the documented
// conventions (multiply-add = 2 FLOPs, gate/bias/elementwise constants per
// architecture).
std::size_t flops_per_step(const ModelSpec& spec);

// Fraction of an ECU's throughput consumed by `rate_hz` inferences per
// second: flops * rate / (clock * flops_per_cycle).
double ecu_budget(std::size_t flops_per_step, double rate_hz, double clock_hz,
                  double flops_per_cycle);

// Shared by the per-architecture kernels.
namespace detail {

inline void matvec(const double* m, std::size_t rows, std::size_t cols, const double* x,
                   double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

inline void matvec_add(const double* m, std::size_t rows, std::size_t cols, const double* x,
                       double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
    y[i] += acc;
  }
}

// y += M^T x  (x has `rows` entries, y has `cols`)
inline void matvec_transposed_add(const double* m, std::size_t rows, std::size_t cols,
                                  const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    const double xi = x[i];
    for (std::size_t j = 0; j < cols; ++j) y[j] += row[j] * xi;
  }
}

// M += u v^T
inline void outer_add(double* m, std::size_t rows, std::size_t cols, const double* u,
                      const double* v) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = m + i * cols;
    const double ui = u[i];
    for (std::size_t j = 0; j < cols; ++j) row[j] += ui * v[j];
  }
}

}  // namespace detail

}  // namespace vws::nn
