#pragma once

#include <span>
#include <vector>

#include "sfcsim/nn/matrix.hpp"
#include "sfcsim/rng.hpp"

namespace sfcsim::nn {

enum class Activation : int { Linear, Relu, Sigmoid };

struct DenseCache {
  std::vector<float> input;
  std::vector<float> preact;
};

/// y = act(W x + b) with exact gradients. He init for relu, Xavier otherwise.
struct DenseLayer {
  Matrix w;  // out x in
  Matrix b;  // 1 x out
  Activation act = Activation::Linear;

  DenseLayer() = default;
  DenseLayer(int in, int out, Activation a) : w(out, in), b(1, out), act(a) {}

  int in_dim() const { return w.cols; }
  int out_dim() const { return w.rows; }

  void init(Rng& rng);

  std::vector<float> forward(std::span<const float> x) const;
  std::vector<float> forward_cached(std::span<const float> x, DenseCache& cache) const;

  /// Accumulates dW/db and returns dL/dx. Throws ShapeMismatch on bad dims.
  std::vector<float> backward(std::span<const float> dy, const DenseCache& cache, Matrix& dw,
                              Matrix& db) const;
};

struct MlpCache {
  std::vector<DenseCache> layers;
};

/// A plain dense stack.
struct Mlp {
  std::vector<DenseLayer> layers;

  static Mlp make(int in, const std::vector<int>& widths, Activation hidden, Activation out,
                  Rng& rng);

  int in_dim() const { return layers.front().in_dim(); }
  int out_dim() const { return layers.back().out_dim(); }
  int param_count() const { return 2 * static_cast<int>(layers.size()); }

  std::vector<float> forward(std::span<const float> x) const;
  std::vector<float> forward_cached(std::span<const float> x, MlpCache& cache) const;

  /// grads must hold param_count() matrices ordered (w0, b0, w1, b1, ...).
  std::vector<float> backward(std::span<const float> dy, const MlpCache& cache,
                              std::span<Matrix> grads) const;

  void collect_params(std::vector<Matrix*>& out);
};

struct AttentionCache {
  std::vector<std::vector<float>> tokens;
  std::vector<std::vector<float>> q, k, v;
  std::vector<std::vector<float>> weights;  // softmax rows, one per query token
  std::vector<DenseCache> qc, kc, vc;
};

/// Single-head scaled dot-product self-attention over a small token list.
/// Projections are square linear layers of the token width.
struct AttentionBlock {
  DenseLayer wq, wk, wv;

  AttentionBlock() = default;
  explicit AttentionBlock(int width)
      : wq(width, width, Activation::Linear),
        wk(width, width, Activation::Linear),
        wv(width, width, Activation::Linear) {}

  int width() const { return wq.in_dim(); }
  static constexpr int param_count() { return 6; }

  void init(Rng& rng);

  std::vector<std::vector<float>> forward(const std::vector<std::vector<float>>& tokens) const;
  std::vector<std::vector<float>> forward_cached(const std::vector<std::vector<float>>& tokens,
                                                 AttentionCache& cache) const;

  /// grads ordered (wq, bq, wk, bk, wv, bv); returns d/dtokens.
  std::vector<std::vector<float>> backward(const std::vector<std::vector<float>>& dout,
                                           const AttentionCache& cache,
                                           std::span<Matrix> grads) const;

  void collect_params(std::vector<Matrix*>& out);
};

}  // namespace sfcsim::nn
