#include "sfcsim/nn/adam.hpp"

#include <cmath>

#include "sfcsim/errors.hpp"

namespace sfcsim::nn {

void Adam::step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw SimError(Errc::ShapeMismatch, "adam parameter/gradient count");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t p = 0; p < params.size(); ++p) {
    Matrix& param = *params[p];
    const Matrix& g = grads[p];
    if (!param.same_shape(m_[p]) || !g.same_shape(m_[p])) {
      throw SimError(Errc::ShapeMismatch, "adam buffer shape");
    }
    for (size_t i = 0; i < param.size(); ++i) {
      const double gi = g.data[i];
      const double m = cfg_.beta1 * m_[p].data[i] + (1.0 - cfg_.beta1) * gi;
      const double v = cfg_.beta2 * v_[p].data[i] + (1.0 - cfg_.beta2) * gi * gi;
      m_[p].data[i] = static_cast<float>(m);
      v_[p].data[i] = static_cast<float>(v);
      param.data[i] -= static_cast<float>(cfg_.lr * (m / c1) / (std::sqrt(v / c2) + cfg_.eps));
    }
  }
}

}  // namespace sfcsim::nn
