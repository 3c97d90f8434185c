#include "sfcsim/nn/layers.hpp"

#include <cmath>
#include <string>

#include "sfcsim/errors.hpp"

namespace sfcsim::nn {

namespace {

float activate(Activation act, float z) {
  switch (act) {
    case Activation::Relu: return z > 0.0f ? z : 0.0f;
    case Activation::Sigmoid: return 1.0f / (1.0f + std::exp(-z));
    case Activation::Linear: return z;
  }
  return z;
}

float activate_grad(Activation act, float z) {
  switch (act) {
    case Activation::Relu: return z > 0.0f ? 1.0f : 0.0f;
    case Activation::Sigmoid: {
      const float s = 1.0f / (1.0f + std::exp(-z));
      return s * (1.0f - s);
    }
    case Activation::Linear: return 1.0f;
  }
  return 1.0f;
}

void check_dim(size_t got, int want, const char* what) {
  if (static_cast<int>(got) != want) {
    throw SimError(Errc::ShapeMismatch,
                   std::string(what) + ": got " + std::to_string(got) + ", want " +
                       std::to_string(want));
  }
}

}  // namespace

void DenseLayer::init(Rng& rng) {
  if (act == Activation::Relu) {
    const double std = std::sqrt(2.0 / in_dim());
    for (auto& x : w.data) x = static_cast<float>(rng.normal() * std);
  } else {
    const double bound = std::sqrt(6.0 / (in_dim() + out_dim()));
    for (auto& x : w.data) x = static_cast<float>(rng.uniform_real(-bound, bound));
  }
  b.zero();
}

std::vector<float> DenseLayer::forward(std::span<const float> x) const {
  check_dim(x.size(), in_dim(), "dense input");
  std::vector<float> y(static_cast<size_t>(out_dim()));
  for (int o = 0; o < out_dim(); ++o) {
    float z = b.at(0, o);
    const float* row = &w.data[static_cast<size_t>(o) * in_dim()];
    for (int i = 0; i < in_dim(); ++i) z += row[i] * x[static_cast<size_t>(i)];
    y[static_cast<size_t>(o)] = activate(act, z);
  }
  return y;
}

std::vector<float> DenseLayer::forward_cached(std::span<const float> x, DenseCache& cache) const {
  check_dim(x.size(), in_dim(), "dense input");
  cache.input.assign(x.begin(), x.end());
  cache.preact.resize(static_cast<size_t>(out_dim()));
  std::vector<float> y(static_cast<size_t>(out_dim()));
  for (int o = 0; o < out_dim(); ++o) {
    float z = b.at(0, o);
    const float* row = &w.data[static_cast<size_t>(o) * in_dim()];
    for (int i = 0; i < in_dim(); ++i) z += row[i] * x[static_cast<size_t>(i)];
    cache.preact[static_cast<size_t>(o)] = z;
    y[static_cast<size_t>(o)] = activate(act, z);
  }
  return y;
}

std::vector<float> DenseLayer::backward(std::span<const float> dy, const DenseCache& cache,
                                        Matrix& dw, Matrix& db) const {
  check_dim(dy.size(), out_dim(), "dense upstream gradient");
  check_dim(cache.input.size(), in_dim(), "dense cache");
  if (!dw.same_shape(w) || !db.same_shape(b)) {
    throw SimError(Errc::ShapeMismatch, "dense gradient buffers");
  }
  std::vector<float> dx(static_cast<size_t>(in_dim()), 0.0f);
  for (int o = 0; o < out_dim(); ++o) {
    const float dz = dy[static_cast<size_t>(o)] * activate_grad(act, cache.preact[static_cast<size_t>(o)]);
    db.at(0, o) += dz;
    float* dwrow = &dw.data[static_cast<size_t>(o) * in_dim()];
    const float* wrow = &w.data[static_cast<size_t>(o) * in_dim()];
    for (int i = 0; i < in_dim(); ++i) {
      dwrow[i] += dz * cache.input[static_cast<size_t>(i)];
      dx[static_cast<size_t>(i)] += dz * wrow[i];
    }
  }
  return dx;
}

Mlp Mlp::make(int in, const std::vector<int>& widths, Activation hidden, Activation out,
              Rng& rng) {
  Mlp mlp;
  int prev = in;
  for (size_t i = 0; i < widths.size(); ++i) {
    const bool last = i + 1 == widths.size();
    mlp.layers.emplace_back(prev, widths[i], last ? out : hidden);
    mlp.layers.back().init(rng);
    prev = widths[i];
  }
  return mlp;
}

std::vector<float> Mlp::forward(std::span<const float> x) const {
  std::vector<float> cur(x.begin(), x.end());
  for (const auto& layer : layers) cur = layer.forward(cur);
  return cur;
}

std::vector<float> Mlp::forward_cached(std::span<const float> x, MlpCache& cache) const {
  cache.layers.resize(layers.size());
  std::vector<float> cur(x.begin(), x.end());
  for (size_t i = 0; i < layers.size(); ++i) cur = layers[i].forward_cached(cur, cache.layers[i]);
  return cur;
}

std::vector<float> Mlp::backward(std::span<const float> dy, const MlpCache& cache,
                                 std::span<Matrix> grads) const {
  if (static_cast<int>(grads.size()) != param_count()) {
    throw SimError(Errc::ShapeMismatch, "mlp gradient buffer count");
  }
  std::vector<float> cur(dy.begin(), dy.end());
  for (int i = static_cast<int>(layers.size()) - 1; i >= 0; --i) {
    cur = layers[static_cast<size_t>(i)].backward(cur, cache.layers[static_cast<size_t>(i)],
                                                  grads[static_cast<size_t>(2 * i)],
                                                  grads[static_cast<size_t>(2 * i + 1)]);
  }
  return cur;
}

void Mlp::collect_params(std::vector<Matrix*>& out) {
  for (auto& layer : layers) {
    out.push_back(&layer.w);
    out.push_back(&layer.b);
  }
}

void AttentionBlock::init(Rng& rng) {
  wq.init(rng);
  wk.init(rng);
  wv.init(rng);
}

std::vector<std::vector<float>> AttentionBlock::forward(
    const std::vector<std::vector<float>>& tokens) const {
  AttentionCache scratch;
  return forward_cached(tokens, scratch);
}

std::vector<std::vector<float>> AttentionBlock::forward_cached(
    const std::vector<std::vector<float>>& tokens, AttentionCache& cache) const {
  const int t = static_cast<int>(tokens.size());
  const int d = width();
  cache.tokens = tokens;
  cache.q.resize(tokens.size());
  cache.k.resize(tokens.size());
  cache.v.resize(tokens.size());
  cache.qc.resize(tokens.size());
  cache.kc.resize(tokens.size());
  cache.vc.resize(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    cache.q[i] = wq.forward_cached(tokens[i], cache.qc[i]);
    cache.k[i] = wk.forward_cached(tokens[i], cache.kc[i]);
    cache.v[i] = wv.forward_cached(tokens[i], cache.vc[i]);
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  cache.weights.assign(tokens.size(), std::vector<float>(tokens.size()));
  std::vector<std::vector<float>> out(tokens.size(), std::vector<float>(static_cast<size_t>(d), 0.0f));
  for (int i = 0; i < t; ++i) {
    // softmax over scaled dot products, max-shifted for stability
    std::vector<double> scores(static_cast<size_t>(t));
    double max_s = -1e300;
    for (int j = 0; j < t; ++j) {
      double s = 0.0;
      for (int e = 0; e < d; ++e) {
        s += static_cast<double>(cache.q[static_cast<size_t>(i)][static_cast<size_t>(e)]) *
             cache.k[static_cast<size_t>(j)][static_cast<size_t>(e)];
      }
      scores[static_cast<size_t>(j)] = s * scale;
      max_s = std::max(max_s, scores[static_cast<size_t>(j)]);
    }
    double denom = 0.0;
    for (int j = 0; j < t; ++j) denom += std::exp(scores[static_cast<size_t>(j)] - max_s);
    for (int j = 0; j < t; ++j) {
      const float a =
          static_cast<float>(std::exp(scores[static_cast<size_t>(j)] - max_s) / denom);
      cache.weights[static_cast<size_t>(i)][static_cast<size_t>(j)] = a;
      for (int e = 0; e < d; ++e) {
        out[static_cast<size_t>(i)][static_cast<size_t>(e)] +=
            a * cache.v[static_cast<size_t>(j)][static_cast<size_t>(e)];
      }
    }
  }
  return out;
}

std::vector<std::vector<float>> AttentionBlock::backward(
    const std::vector<std::vector<float>>& dout, const AttentionCache& cache,
    std::span<Matrix> grads) const {
  if (static_cast<int>(grads.size()) != param_count()) {
    throw SimError(Errc::ShapeMismatch, "attention gradient buffer count");
  }
  const int t = static_cast<int>(cache.tokens.size());
  const int d = width();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  std::vector<std::vector<float>> dq(cache.tokens.size(), std::vector<float>(static_cast<size_t>(d), 0.0f));
  std::vector<std::vector<float>> dk = dq, dv = dq;

  for (int i = 0; i < t; ++i) {
    // dv and the softmax jacobian-vector product for row i
    std::vector<double> da(static_cast<size_t>(t), 0.0);
    for (int j = 0; j < t; ++j) {
      const float a = cache.weights[static_cast<size_t>(i)][static_cast<size_t>(j)];
      double dot = 0.0;
      for (int e = 0; e < d; ++e) {
        dv[static_cast<size_t>(j)][static_cast<size_t>(e)] +=
            a * dout[static_cast<size_t>(i)][static_cast<size_t>(e)];
        dot += static_cast<double>(dout[static_cast<size_t>(i)][static_cast<size_t>(e)]) *
               cache.v[static_cast<size_t>(j)][static_cast<size_t>(e)];
      }
      da[static_cast<size_t>(j)] = dot;
    }
    double mixed = 0.0;
    for (int j = 0; j < t; ++j) {
      mixed += da[static_cast<size_t>(j)] *
               cache.weights[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    for (int j = 0; j < t; ++j) {
      const double a = cache.weights[static_cast<size_t>(i)][static_cast<size_t>(j)];
      const double ds = a * (da[static_cast<size_t>(j)] - mixed) * scale;
      for (int e = 0; e < d; ++e) {
        dq[static_cast<size_t>(i)][static_cast<size_t>(e)] +=
            static_cast<float>(ds * cache.k[static_cast<size_t>(j)][static_cast<size_t>(e)]);
        dk[static_cast<size_t>(j)][static_cast<size_t>(e)] +=
            static_cast<float>(ds * cache.q[static_cast<size_t>(i)][static_cast<size_t>(e)]);
      }
    }
  }

  std::vector<std::vector<float>> dtokens(cache.tokens.size(),
                                          std::vector<float>(static_cast<size_t>(d), 0.0f));
  for (size_t i = 0; i < cache.tokens.size(); ++i) {
    const auto dxq = wq.backward(dq[i], cache.qc[i], grads[0], grads[1]);
    const auto dxk = wk.backward(dk[i], cache.kc[i], grads[2], grads[3]);
    const auto dxv = wv.backward(dv[i], cache.vc[i], grads[4], grads[5]);
    for (int e = 0; e < d; ++e) {
      dtokens[i][static_cast<size_t>(e)] = dxq[static_cast<size_t>(e)] +
                                           dxk[static_cast<size_t>(e)] +
                                           dxv[static_cast<size_t>(e)];
    }
  }
  return dtokens;
}

void AttentionBlock::collect_params(std::vector<Matrix*>& out) {
  out.push_back(&wq.w);
  out.push_back(&wq.b);
  out.push_back(&wk.w);
  out.push_back(&wk.b);
  out.push_back(&wv.w);
  out.push_back(&wv.b);
}

}  // namespace sfcsim::nn
