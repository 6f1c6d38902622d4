#include "vws/nn/optimizer.hpp"

#include <cmath>

#include "vws/error.hpp"

namespace vws::nn {

double cosine_lr(std::size_t step, std::size_t total_steps, double lr_max, double lr_min) {
  require(total_steps >= 1, "step-out-of-range", "total_steps must be >= 1");
  require(step <= total_steps, "step-out-of-range",
          std::to_string(step) + " > " + std::to_string(total_steps));
  const double phase = M_PI * static_cast<double>(step) / static_cast<double>(total_steps);
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(phase));
}

RAdam::RAdam(std::size_t param_count, RAdamConfig cfg)
    : cfg_(cfg), m_(param_count, 0.0), v_(param_count, 0.0) {}

void RAdam::step(std::span<double> weights, std::span<const double> grad, double lr) {
  require(weights.size() == m_.size() && grad.size() == m_.size(), "weight-shape-mismatch");
  ++t_;
  const double t = static_cast<double>(t_);
  const double beta1_t = std::pow(cfg_.beta1, t);
  const double beta2_t = std::pow(cfg_.beta2, t);
  const double rho_inf = 2.0 / (1.0 - cfg_.beta2) - 1.0;
  const double rho_t = rho_inf - 2.0 * t * beta2_t / (1.0 - beta2_t);

  double rect = 0.0;
  const bool adaptive = rho_t > 4.0;
  if (adaptive) {
    rect = std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) /
                     ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
  }

  for (std::size_t i = 0; i < m_.size(); ++i) {
    const double g = grad[i];
    if (!std::isfinite(g)) fail("non-finite-gradient", "component " + std::to_string(i));
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
    const double m_hat = m_[i] / (1.0 - beta1_t);
    if (cfg_.weight_decay > 0.0) weights[i] -= lr * cfg_.weight_decay * weights[i];
    if (adaptive) {
      const double v_hat = std::sqrt(v_[i] / (1.0 - beta2_t));
      weights[i] -= lr * rect * m_hat / (v_hat + cfg_.epsilon);
    } else {
      weights[i] -= lr * m_hat;
    }
  }
}

}  // namespace vws::nn
