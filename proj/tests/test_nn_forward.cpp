#include <doctest.h>

#include <cmath>

#include "vws/error.hpp"
#include "vws/nn/model.hpp"
#include "vws/rng.hpp"

using namespace vws;
using namespace vws::nn;

namespace {

void set_block(const ModelSpec& spec, std::vector<double>& weights, const char* name,
               const std::vector<double>& values) {
  const WeightBlock& block = weight_layout(spec).block(name);
  REQUIRE(values.size() == block.size());
  std::copy(values.begin(), values.end(), weights.begin() + block.offset);
}

Sequence from_rows(const std::vector<std::vector<double>>& rows) {
  Sequence seq = Sequence::zeros(rows.size(), rows[0].size());
  for (std::size_t t = 0; t < rows.size(); ++t)
    std::copy(rows[t].begin(), rows[t].end(), seq.row(t));
  return seq;
}

}  // namespace

TEST_CASE("all-zero weights map any input to exactly zero") {
  Rng rng(4);
  for (const Arch arch : {Arch::kGru, Arch::kLstm, Arch::kTcn}) {
    ModelSpec spec;
    spec.arch = arch;
    spec.input_size = 5;
    spec.output_size = 2;
    spec.hidden_size = 6;
    spec.tcn_layers = 3;
    spec.kernel_size = 2;
    const std::vector<double> weights(weight_layout(spec).total, 0.0);

    Sequence x = Sequence::zeros(25, 5);
    for (auto& v : x.values) v = rng.gaussian();
    Sequence y;
    model_forward(spec, weights, x, y);
    for (const double v : y.values) CHECK(v == 0.0);
  }
}

TEST_CASE("hand-unrolled GRU recurrence matches model_forward to 1e-12") {
  ModelSpec spec;
  spec.arch = Arch::kGru;
  spec.input_size = 2;
  spec.output_size = 1;
  spec.hidden_size = 2;
  std::vector<double> w(weight_layout(spec).total, 0.0);

  set_block(spec, w, "w_z", {0.5, -0.3, 0.2, 0.1});
  set_block(spec, w, "w_r", {-0.4, 0.6, 0.3, -0.2});
  set_block(spec, w, "w_h", {0.7, 0.1, -0.5, 0.4});
  set_block(spec, w, "u_z", {0.1, 0.2, -0.1, 0.3});
  set_block(spec, w, "u_r", {0.2, -0.3, 0.4, 0.1});
  set_block(spec, w, "u_h", {-0.2, 0.5, 0.3, -0.4});
  set_block(spec, w, "b_z", {0.1, -0.2});
  set_block(spec, w, "b_r", {0.05, 0.15});
  set_block(spec, w, "b_h", {-0.1, 0.2});
  set_block(spec, w, "head_w", {1.5, -2.0});
  set_block(spec, w, "head_b", {0.3});

  const std::vector<std::vector<double>> x = {{0.5, -1.0}, {1.0, 0.25}, {-0.75, 0.5}};

  // Independent scalar evaluation of the recurrence, step by step.
  const auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  double h1 = 0.0, h2 = 0.0;
  std::vector<double> expected;
  for (const auto& xt : x) {
    const double z1 = sig(0.5 * xt[0] - 0.3 * xt[1] + 0.1 * h1 + 0.2 * h2 + 0.1);
    const double z2 = sig(0.2 * xt[0] + 0.1 * xt[1] - 0.1 * h1 + 0.3 * h2 - 0.2);
    const double r1 = sig(-0.4 * xt[0] + 0.6 * xt[1] + 0.2 * h1 - 0.3 * h2 + 0.05);
    const double r2 = sig(0.3 * xt[0] - 0.2 * xt[1] + 0.4 * h1 + 0.1 * h2 + 0.15);
    const double c1 = std::tanh(0.7 * xt[0] + 0.1 * xt[1] - 0.2 * (r1 * h1) + 0.5 * (r2 * h2) - 0.1);
    const double c2 = std::tanh(-0.5 * xt[0] + 0.4 * xt[1] + 0.3 * (r1 * h1) - 0.4 * (r2 * h2) + 0.2);
    h1 = (1.0 - z1) * h1 + z1 * c1;
    h2 = (1.0 - z2) * h2 + z2 * c2;
    expected.push_back(1.5 * h1 - 2.0 * h2 + 0.3);
  }

  Sequence y;
  model_forward(spec, w, from_rows(x), y);
  for (std::size_t t = 0; t < expected.size(); ++t)
    CHECK(std::abs(y.row(t)[0] - expected[t]) < 1e-12);
}

TEST_CASE("outputs before a perturbation are bitwise unchanged") {
  for (const Arch arch : {Arch::kGru, Arch::kLstm, Arch::kTcn}) {
    ModelSpec spec;
    spec.arch = arch;
    spec.input_size = 5;
    spec.output_size = 2;
    spec.hidden_size = 8;
    spec.tcn_layers = 3;
    spec.kernel_size = 2;
    spec.seed = 99;
    const std::vector<double> w = init_weights(spec);

    Rng rng(12);
    Sequence x = Sequence::zeros(30, 5);
    for (auto& v : x.values) v = rng.gaussian();
    Sequence y_base;
    model_forward(spec, w, x, y_base);

    const std::size_t t_perturb = 12;
    Sequence x2 = x;
    x2.row(t_perturb)[3] += 0.5;
    Sequence y_mod;
    model_forward(spec, w, x2, y_mod);

    for (std::size_t t = 0; t < t_perturb; ++t)
      for (std::size_t d = 0; d < 2; ++d) CHECK(y_mod.row(t)[d] == y_base.row(t)[d]);
    // And the perturbation is visible at its own step or later.
    bool changed = false;
    for (std::size_t t = t_perturb; t < x.steps; ++t)
      for (std::size_t d = 0; d < 2; ++d) changed |= y_mod.row(t)[d] != y_base.row(t)[d];
    CHECK(changed);
  }
}

TEST_CASE("TCN perturbation horizon equals the receptive-field formula") {
  ModelSpec spec;
  spec.arch = Arch::kTcn;
  spec.input_size = 3;
  spec.output_size = 1;
  spec.hidden_size = 4;
  spec.tcn_layers = 3;
  spec.kernel_size = 2;
  CHECK(spec.receptive_field() == 8);  // (2-1)(2^3-1)+1

  // Strictly positive weights keep every ReLU active, so the measured
  // horizon is the structural one, not an activation accident.
  std::vector<double> w(weight_layout(spec).total, 0.05);
  Rng rng(3);
  Sequence x = Sequence::zeros(40, 3);
  for (auto& v : x.values) v = 0.5 + rng.uniform();
  Sequence y_base;
  model_forward(spec, w, x, y_base);

  const std::size_t p = 10;
  Sequence x2 = x;
  x2.row(p)[1] += 1.0;
  Sequence y_mod;
  model_forward(spec, w, x2, y_mod);

  std::size_t last_changed = 0;
  for (std::size_t t = 0; t < x.steps; ++t)
    if (y_mod.row(t)[0] != y_base.row(t)[0]) last_changed = t;
  CHECK(last_changed - p + 1 == spec.receptive_field());
}

TEST_CASE("weight vectors of the wrong size are rejected") {
  ModelSpec spec;
  spec.hidden_size = 4;
  const std::vector<double> short_weights(10, 0.0);
  Sequence x = Sequence::zeros(5, 5);
  Sequence y;
  CHECK_THROWS_WITH_AS(model_forward(spec, short_weights, x, y),
                       doctest::Contains("weight-shape-mismatch"), Error);
}

TEST_CASE("layout blocks are contiguous, non-overlapping and covering") {
  for (const Arch arch : {Arch::kGru, Arch::kLstm, Arch::kTcn}) {
    ModelSpec spec;
    spec.arch = arch;
    spec.hidden_size = 7;
    spec.tcn_layers = 4;
    spec.kernel_size = 3;
    const WeightLayout layout = weight_layout(spec);
    std::size_t cursor = 0;
    for (const auto& block : layout.blocks) {
      CHECK(block.offset == cursor);
      cursor += block.size();
    }
    CHECK(cursor == layout.total);
  }
}

TEST_CASE("orthogonal initialization really is orthogonal") {
  ModelSpec spec;
  spec.arch = Arch::kGru;
  spec.hidden_size = 16;
  spec.seed = 5;
  const std::vector<double> w = init_weights(spec);
  const WeightBlock& block = weight_layout(spec).block("u_z");
  const std::size_t h = spec.hidden_size;
  // U^T U == I
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < h; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < h; ++k)
        dot += w[block.offset + k * h + i] * w[block.offset + k * h + j];
      CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("FLOPs formulas match the hand counts") {
  ModelSpec gru;
  gru.arch = Arch::kGru;
  gru.input_size = 5;
  gru.output_size = 2;
  gru.hidden_size = 32;
  CHECK(flops_per_step(gru) == 7712);

  ModelSpec tiny;
  tiny.arch = Arch::kGru;
  tiny.input_size = 1;
  tiny.output_size = 1;
  tiny.hidden_size = 1;
  CHECK(flops_per_step(tiny) == 29);

  // Doubling h roughly quadruples the h*h term.
  ModelSpec h64 = gru;
  h64.hidden_size = 64;
  const double ratio = static_cast<double>(flops_per_step(h64)) /
                       static_cast<double>(flops_per_step(gru));
  CHECK(ratio > 3.0);
  CHECK(ratio < 4.0);

  // Strict monotonicity over the sweep span, all architectures.
  for (const Arch arch : {Arch::kGru, Arch::kLstm, Arch::kTcn}) {
    std::size_t previous = 0;
    for (const std::size_t h : {16, 32, 48, 64, 96, 128, 160}) {
      ModelSpec spec;
      spec.arch = arch;
      spec.hidden_size = h;
      const std::size_t f = flops_per_step(spec);
      CHECK(f > previous);
      previous = f;
    }
  }
}

TEST_CASE("ECU budget arithmetic") {
  CHECK(ecu_budget(7712, 50.0, 300e6, 1.0) == doctest::Approx(0.001285).epsilon(1e-3));
  CHECK(std::abs(ecu_budget(7712, 50.0, 300e6, 1.0) - 0.001285) <= 1e-6);
  CHECK(ecu_budget(1, 100.0, 100.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // 0.2 MFLOPs per inference at one inference per 4 s window.
  CHECK(ecu_budget(200000, 0.25, 300e6, 1.0) == doctest::Approx(1.6667e-4).epsilon(1e-3));
  CHECK_THROWS_WITH_AS(ecu_budget(100, 0.0, 1.0, 1.0), doctest::Contains("invalid-budget"),
                       Error);
}
