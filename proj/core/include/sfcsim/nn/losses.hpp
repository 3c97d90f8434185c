#pragma once

#include <span>
#include <vector>

namespace sfcsim::nn {

/// Mean squared error over the whole vector.
double mse(std::span<const float> pred, std::span<const float> target);

/// d(mse)/d(pred), i.e. 2 (pred - target) / n.
std::vector<float> mse_grad(std::span<const float> pred, std::span<const float> target);

/// Huber loss of a scalar residual (quadratic within delta, linear outside).
double huber(double residual, double delta = 1.0);
double huber_grad(double residual, double delta = 1.0);

/// KL(N(mu, e^logvar) || N(0, I)) = 0.5 * sum(mu^2 + e^logvar - 1 - logvar).
double kl_gaussian(std::span<const float> mu, std::span<const float> logvar);

/// d(kl)/d(mu) = mu, d(kl)/d(logvar) = 0.5 (e^logvar - 1), both appended to
/// the given accumulators scaled by `scale`.
void kl_gaussian_grad(std::span<const float> mu, std::span<const float> logvar, double scale,
                      std::span<float> dmu, std::span<float> dlogvar);

/// z = mu + exp(logvar / 2) * noise, elementwise.
std::vector<float> reparameterize(std::span<const float> mu, std::span<const float> logvar,
                                  std::span<const float> noise);

/// Backpropagates dz through the reparameterization: dmu += dz,
/// dlogvar += 0.5 dz noise exp(logvar / 2).
void reparameterize_grad(std::span<const float> dz, std::span<const float> logvar,
                         std::span<const float> noise, std::span<float> dmu,
                         std::span<float> dlogvar);

}  // namespace sfcsim::nn
