#include "sfcsim/nn/losses.hpp"

#include <cmath>
#include <string>

#include "sfcsim/errors.hpp"

namespace sfcsim::nn {

namespace {
void check_same(size_t a, size_t b, const char* what) {
  if (a != b) {
    throw SimError(Errc::ShapeMismatch,
                   std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}
}  // namespace

double mse(std::span<const float> pred, std::span<const float> target) {
  check_same(pred.size(), target.size(), "mse");
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - target[i];
    sum += d * d;
  }
  return pred.empty() ? 0.0 : sum / static_cast<double>(pred.size());
}

std::vector<float> mse_grad(std::span<const float> pred, std::span<const float> target) {
  check_same(pred.size(), target.size(), "mse_grad");
  std::vector<float> g(pred.size());
  const double n = static_cast<double>(pred.size());
  for (size_t i = 0; i < pred.size(); ++i) {
    g[i] = static_cast<float>(2.0 * (static_cast<double>(pred[i]) - target[i]) / n);
  }
  return g;
}

double huber(double residual, double delta) {
  const double a = std::abs(residual);
  if (a <= delta) return 0.5 * residual * residual;
  return delta * (a - 0.5 * delta);
}

double huber_grad(double residual, double delta) {
  if (residual > delta) return delta;
  if (residual < -delta) return -delta;
  return residual;
}

double kl_gaussian(std::span<const float> mu, std::span<const float> logvar) {
  check_same(mu.size(), logvar.size(), "kl_gaussian");
  double sum = 0.0;
  for (size_t i = 0; i < mu.size(); ++i) {
    const double m = mu[i];
    const double lv = logvar[i];
    sum += m * m + std::exp(lv) - 1.0 - lv;
  }
  return 0.5 * sum;
}

void kl_gaussian_grad(std::span<const float> mu, std::span<const float> logvar, double scale,
                      std::span<float> dmu, std::span<float> dlogvar) {
  check_same(mu.size(), logvar.size(), "kl_gaussian_grad");
  check_same(dmu.size(), mu.size(), "kl_gaussian_grad dmu");
  check_same(dlogvar.size(), mu.size(), "kl_gaussian_grad dlogvar");
  for (size_t i = 0; i < mu.size(); ++i) {
    dmu[i] += static_cast<float>(scale * mu[i]);
    dlogvar[i] += static_cast<float>(scale * 0.5 * (std::exp(static_cast<double>(logvar[i])) - 1.0));
  }
}

std::vector<float> reparameterize(std::span<const float> mu, std::span<const float> logvar,
                                  std::span<const float> noise) {
  check_same(mu.size(), logvar.size(), "reparameterize");
  check_same(mu.size(), noise.size(), "reparameterize noise");
  std::vector<float> z(mu.size());
  for (size_t i = 0; i < mu.size(); ++i) {
    z[i] = mu[i] + std::exp(logvar[i] * 0.5f) * noise[i];
  }
  return z;
}

void reparameterize_grad(std::span<const float> dz, std::span<const float> logvar,
                         std::span<const float> noise, std::span<float> dmu,
                         std::span<float> dlogvar) {
  check_same(dz.size(), logvar.size(), "reparameterize_grad");
  for (size_t i = 0; i < dz.size(); ++i) {
    dmu[i] += dz[i];
    dlogvar[i] += 0.5f * dz[i] * noise[i] * std::exp(logvar[i] * 0.5f);
  }
}

}  // namespace sfcsim::nn
