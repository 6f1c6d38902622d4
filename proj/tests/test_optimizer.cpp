#include <doctest.h>

#include <cmath>

#include "vws/error.hpp"
#include "vws/nn/optimizer.hpp"

using namespace vws;
using namespace vws::nn;

TEST_CASE("cosine schedule endpoints and midpoint") {
  CHECK(cosine_lr(0, 100, 1e-2, 1e-5) == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(cosine_lr(100, 100, 1e-2, 1e-5) == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(cosine_lr(50, 100, 1e-2, 1e-5) ==
        doctest::Approx(0.5 * (1e-2 + 1e-5)).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(cosine_lr(101, 100, 1e-2, 1e-5), doctest::Contains("step-out-of-range"),
                       Error);
}

TEST_CASE("first RAdam step takes the momentum branch") {
  // rho_1 = rho_inf - 2 beta2 / (1 - beta2) = 1999 - 1998 = 1 <= 4 for
  // beta2 = 0.999, so step one must be -lr * mhat with no sqrt(v) anywhere.
  RAdam opt(1);
  std::vector<double> w{1.0};
  const std::vector<double> g{0.5};
  opt.step(w, g, 0.1);
  // m = 0.1 * 0.5 = 0.05; mhat = 0.05 / 0.1 = 0.5; w -= 0.1 * 0.5
  CHECK(w[0] == doctest::Approx(0.95).epsilon(1e-15));

  // Linearity in the gradient confirms the unadapted branch.
  RAdam opt_a(1), opt_b(1);
  std::vector<double> wa{0.0}, wb{0.0};
  const std::vector<double> ga{0.3}, gb{0.6};
  opt_a.step(wa, ga, 0.1);
  opt_b.step(wb, gb, 0.1);
  CHECK(wb[0] == doctest::Approx(2.0 * wa[0]).epsilon(1e-14));
}

TEST_CASE("zero gradients leave the weights untouched forever") {
  RAdam opt(3);
  std::vector<double> w{1.0, -2.0, 0.5};
  const std::vector<double> original = w;
  const std::vector<double> g(3, 0.0);
  for (int i = 0; i < 50; ++i) opt.step(w, g, 0.05);
  CHECK(w == original);
}

TEST_CASE("scalar quadratic descends strictly over 100 steps") {
  RAdam opt(1);
  std::vector<double> w{1.0};
  double previous = w[0];
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> g{w[0]};  // d/dw of w^2 / 2
    opt.step(w, g, 0.01);
    CHECK(std::abs(w[0]) < std::abs(previous));
    previous = w[0];
  }
  CHECK(w[0] > 0.0);
}

TEST_CASE("non-finite gradients are rejected") {
  RAdam opt(2);
  std::vector<double> w{1.0, 1.0};
  const std::vector<double> g{0.1, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_WITH_AS(opt.step(w, g, 0.01), doctest::Contains("non-finite-gradient"), Error);
}

TEST_CASE("decoupled weight decay shrinks weights without gradients biasing it") {
  RAdamConfig cfg;
  cfg.weight_decay = 0.1;
  RAdam opt(1, cfg);
  std::vector<double> w{2.0};
  const std::vector<double> gz{0.0};
  opt.step(w, gz, 0.5);
  // Pure decay: w -= lr * wd * w = 2.0 - 0.5 * 0.1 * 2.0
  CHECK(w[0] == doctest::Approx(1.9).epsilon(1e-15));
}
