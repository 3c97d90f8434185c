#pragma once

#include <vector>

#include "sfcsim/nn/matrix.hpp"

namespace sfcsim::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam. Moment buffers are allocated to match the parameter
/// list handed to the constructor and must be stepped with the same list.
class Adam {
 public:
  Adam(AdamConfig cfg, const std::vector<Matrix*>& params)
      : cfg_(cfg), m_(make_like(params)), v_(make_like(params)) {}

  void step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads);

  long steps_taken() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long t_ = 0;
};

}  // namespace sfcsim::nn
