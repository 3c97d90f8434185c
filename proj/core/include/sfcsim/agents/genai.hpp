#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfcsim/agents/dqn.hpp"
#include "sfcsim/agents/encoding.hpp"
#include "sfcsim/nn/adam.hpp"
#include "sfcsim/nn/layers.hpp"
#include "sfcsim/sim/environment.hpp"

namespace sfcsim {

/// Weights of the per-step DC value label. The label scores what the acted-on
/// DC contributed and how useful it remains:
///   w1 * (VNF allocations bound at the DC this step)
/// + w2 * sum over pending requests allocatable at the DC of (1 - slack/limit)
/// + w3 * mean free resource fraction (cpu, storage, ram)
/// + w4 * mean incident-link free bandwidth fraction
/// - w5 * (drops this step whose last bound VNF sat on the DC)
/// Terms 2-4 are evaluated on the post-step state.
struct ValueLabelWeights {
  double w1 = 2.0;
  double w2 = 1.0;
  double w3 = 0.5;
  double w4 = 0.5;
  double w5 = 1.5;
};

struct GenaiConfig {
  int latent_dim = 16;
  std::vector<int> vae_hidden = {64};
  std::vector<int> value_hidden = {32};
  double beta = 1.0;  // KL weight
  double vae_learning_rate = 1e-3;
  double value_learning_rate = 1e-3;
  int batch_size = 64;
  int vae_epochs = 30;
  int value_epochs = 30;
  double holdout_fraction = 0.1;
  ValueLabelWeights label;
  EncoderConfig encoder;
  double collect_epsilon = 0.0;  // exploration of the action policy while collecting
  int collect_max_episodes = 200;
};

/// One dataset row: a DC's state, its state after the step, and the value
/// label for that step.
struct TransitionRow {
  std::vector<float> state;       // kDcStateDim floats
  std::vector<float> next_state;  // kDcStateDim floats
  float value = 0.0f;

  bool operator==(const TransitionRow&) const = default;
};

/// Gaussian-latent autoencoder predicting a DC's next state vector.
class VaeNet {
 public:
  VaeNet() = default;
  VaeNet(const GenaiConfig& cfg, std::uint64_t init_seed, int state_dim = kDcStateDim);

  int latent_dim() const { return mu_.out_dim(); }
  int state_dim() const { return dec_.out_dim(); }

  struct EncodeCache {
    nn::MlpCache trunk;
    nn::DenseCache mu, logvar;
    std::vector<float> trunk_out;
  };
  struct DecodeCache {
    nn::MlpCache dec;
  };

  std::pair<std::vector<float>, std::vector<float>> encode(std::span<const float> x) const;
  std::pair<std::vector<float>, std::vector<float>> encode_cached(std::span<const float> x,
                                                                  EncodeCache& cache) const;
  std::vector<float> decode(std::span<const float> z) const;
  std::vector<float> decode_cached(std::span<const float> z, DecodeCache& cache) const;

  std::vector<nn::Matrix*> parameters();
  std::vector<nn::Matrix*> encoder_parameters();
  std::vector<nn::Matrix*> decoder_parameters();

  void save(const std::string& path) const;
  void load(const std::string& path);

  /// Gradient plumbing used by the trainer; grads are shaped like
  /// parameters(): encoder trunk, mu head, logvar head, decoder.
  std::vector<float> decoder_backward(std::span<const float> dxhat, const DecodeCache& cache,
                                      std::vector<nn::Matrix>& grads);
  void encoder_backward(std::span<const float> dmu, std::span<const float> dlogvar,
                        const EncodeCache& cache, std::vector<nn::Matrix>& grads);

 private:
  nn::Mlp enc_;
  nn::DenseLayer mu_;
  nn::DenseLayer logvar_;
  nn::Mlp dec_;
};

/// Dense regressor from the VAE's mean embedding to a scalar DC value.
class ValueNet {
 public:
  ValueNet() = default;
  ValueNet(const GenaiConfig& cfg, std::uint64_t init_seed);

  double score(std::span<const float> embedding) const;

  std::vector<nn::Matrix*> parameters();
  void save(const std::string& path) const;
  void load(const std::string& path);

  nn::Mlp& mlp() { return mlp_; }
  const nn::Mlp& mlp() const { return mlp_; }

 private:
  nn::Mlp mlp_;
};

/// Value label for the step taken between two environment snapshots with the
/// action applied at dc_id.
double compute_value_label(const Environment& before, const Environment& after, int dc_id,
                           const ValueLabelWeights& w, const EncoderConfig& enc);

/// Runs episodes with uniform-random DC selection and the given action net,
/// recording one (state, next_state, value) row per step for the selected DC.
/// Throws DatasetTooSmall when collect_max_episodes runs out first.
std::vector<TransitionRow> collect_dataset(const SimConfig& base, const Catalog& catalog,
                                           const DqnNet& action_net, const GenaiConfig& cfg,
                                           std::uint64_t seed, int target_rows);

/// Binary dataset file: u32 magic "SFDS", u32 version, u64 row count,
/// u32 state dim, then per row state, next_state and the value label as
/// little-endian float32. A plain-text schema sidecar is written next to it.
void save_dataset(const std::string& path, const std::vector<TransitionRow>& rows);
std::vector<TransitionRow> load_dataset(const std::string& path);

struct VaeEpochPoint {
  int epoch = 0;
  double train_recon = 0.0;
  double train_kl = 0.0;
  double holdout_recon = 0.0;
};

struct VaeTrainResult {
  std::vector<VaeEpochPoint> curve;
  double initial_holdout_recon = 0.0;
  double final_holdout_recon = 0.0;
};

/// Reconstruction + beta * KL with sampled latents on the training split;
/// holdout reconstruction is evaluated noise-free. Throws Diverged on
/// non-finite loss.
VaeTrainResult train_vae(VaeNet& model, const std::vector<TransitionRow>& dataset,
                         const GenaiConfig& cfg, std::uint64_t seed);

struct ValueTrainResult {
  std::vector<double> epoch_loss;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

/// MSE regression of value labels on frozen mean embeddings.
ValueTrainResult train_value(ValueNet& value_net, const VaeNet& model,
                             const std::vector<TransitionRow>& dataset, const GenaiConfig& cfg,
                             std::uint64_t seed);

/// Scores every DC with the value network over its noise-free embedding and
/// returns the argmax id (ties to the lowest id). Deterministic.
int select_dc(const Environment& env, const VaeNet& model, const ValueNet& value_net,
              const EncoderConfig& enc);

class GenaiDcSelector : public DcSelector {
 public:
  GenaiDcSelector(const VaeNet& model, const ValueNet& value_net, const EncoderConfig& enc)
      : model_(model), value_(value_net), enc_(enc) {}

  int select(const Environment& env) override { return select_dc(env, model_, value_, enc_); }

 private:
  const VaeNet& model_;
  const ValueNet& value_;
  EncoderConfig enc_;
};

}  // namespace sfcsim
