#pragma once

// Double-precision re-implementation of the network forward passes, kept
// independent of the float32 production path. Used as the finite-difference
// oracle for gradient checks and to cross-check forward values.

#include <cmath>
#include <functional>
#include <vector>

#include "sfcsim/nn/layers.hpp"
#include "sfcsim/nn/matrix.hpp"

namespace nn_oracle {

using dvec = std::vector<double>;
using sfcsim::nn::Activation;
using sfcsim::nn::DenseLayer;
using sfcsim::nn::Matrix;

inline double act_d(Activation a, double z) {
  switch (a) {
    case Activation::Relu: return z > 0 ? z : 0.0;
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::Linear: return z;
  }
  return z;
}

inline dvec dense_d(const DenseLayer& l, const dvec& x) {
  dvec y(static_cast<size_t>(l.out_dim()));
  for (int o = 0; o < l.out_dim(); ++o) {
    double z = l.b.at(0, o);
    for (int i = 0; i < l.in_dim(); ++i) z += static_cast<double>(l.w.at(o, i)) * x[static_cast<size_t>(i)];
    y[static_cast<size_t>(o)] = act_d(l.act, z);
  }
  return y;
}

inline dvec mlp_d(const sfcsim::nn::Mlp& mlp, dvec x) {
  for (const auto& l : mlp.layers) x = dense_d(l, x);
  return x;
}

inline std::vector<dvec> attention_d(const sfcsim::nn::AttentionBlock& blk,
                                     const std::vector<dvec>& tokens) {
  const size_t t = tokens.size();
  const int d = blk.width();
  std::vector<dvec> q(t), k(t), v(t);
  for (size_t i = 0; i < t; ++i) {
    q[i] = dense_d(blk.wq, tokens[i]);
    k[i] = dense_d(blk.wk, tokens[i]);
    v[i] = dense_d(blk.wv, tokens[i]);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<dvec> out(t, dvec(static_cast<size_t>(d), 0.0));
  for (size_t i = 0; i < t; ++i) {
    dvec scores(t);
    double mx = -1e300;
    for (size_t j = 0; j < t; ++j) {
      double s = 0.0;
      for (int e = 0; e < d; ++e) s += q[i][static_cast<size_t>(e)] * k[j][static_cast<size_t>(e)];
      scores[j] = s * scale;
      mx = std::max(mx, scores[j]);
    }
    double denom = 0.0;
    for (size_t j = 0; j < t; ++j) denom += std::exp(scores[j] - mx);
    for (size_t j = 0; j < t; ++j) {
      const double a = std::exp(scores[j] - mx) / denom;
      for (int e = 0; e < d; ++e) out[i][static_cast<size_t>(e)] += a * v[j][static_cast<size_t>(e)];
    }
  }
  return out;
}

inline double mse_d(const dvec& pred, const dvec& target) {
  double s = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    s += d * d;
  }
  return pred.empty() ? 0.0 : s / static_cast<double>(pred.size());
}

inline double kl_d(const dvec& mu, const dvec& logvar) {
  double s = 0.0;
  for (size_t i = 0; i < mu.size(); ++i) {
    s += mu[i] * mu[i] + std::exp(logvar[i]) - 1.0 - logvar[i];
  }
  return 0.5 * s;
}

inline dvec to_d(std::span<const float> x) { return dvec(x.begin(), x.end()); }

/// Central finite difference of `loss` with respect to every entry of every
/// parameter tensor. `loss` must read the (float) parameters on every call.
inline std::vector<Matrix> finite_difference(const std::vector<Matrix*>& params,
                                             const std::function<double()>& loss,
                                             float h = 1e-3f) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (auto* p : params) {
    Matrix g(p->rows, p->cols);
    for (size_t i = 0; i < p->size(); ++i) {
      const float orig = p->data[i];
      p->data[i] = orig + h;
      const double hi = static_cast<double>(p->data[i]);
      const double fp = loss();
      p->data[i] = orig - h;
      const double lo = static_cast<double>(p->data[i]);
      const double fm = loss();
      p->data[i] = orig;
      g.data[i] = static_cast<float>((fp - fm) / (hi - lo));
    }
    out.push_back(std::move(g));
  }
  return out;
}

/// max over all entries of |a - b| / max(|a| + |b|, floor)
inline double max_rel_err(const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                          double floor = 1e-3) {
  double worst = 0.0;
  for (size_t p = 0; p < a.size(); ++p) {
    for (size_t i = 0; i < a[p].size(); ++i) {
      const double x = a[p].data[i];
      const double y = b[p].data[i];
      const double rel = std::abs(x - y) / std::max(std::abs(x) + std::abs(y), floor);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace nn_oracle
