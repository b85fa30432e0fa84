#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace p2psim::rl {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
public:
  Adam() = default;
  Adam(std::size_t param_count, AdamConfig config);

  void step(std::span<double> params, std::span<const double> grad);
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  long steps() const { return t_; }

private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

double global_norm(std::span<const double> grad);

// Rescales `grad` in place so its L2 norm is at most `max_norm`. Returns the
// norm before clipping.
double clip_grad_norm(std::span<double> grad, double max_norm);

} // namespace p2psim::rl
