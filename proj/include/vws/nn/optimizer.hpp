#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vws::nn {

// lr_min + 0.5 (lr_max - lr_min) (1 + cos(pi step / total_steps)).
double cosine_lr(std::size_t step, std::size_t total_steps, double lr_max, double lr_min);

struct RAdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 0.0;  // decoupled
  double epsilon = 1e-8;
};

// Rectified Adam. While the variance estimate is unreliable
// (rho_t <= 4, always true at t = 1 for beta2 = 0.999) the update falls
// back to plain bias-corrected momentum; afterwards the adaptive step is
// scaled by the rectification factor r_t.
class RAdam {
 public:
  explicit RAdam(std::size_t param_count, RAdamConfig cfg = {});

  void step(std::span<double> weights, std::span<const double> grad, double lr);

  std::size_t steps_taken() const { return t_; }

 private:
  RAdamConfig cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

}  // namespace vws::nn
