#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfcsim/agents/encoding.hpp"
#include "sfcsim/nn/adam.hpp"
#include "sfcsim/nn/layers.hpp"
#include "sfcsim/sim/environment.hpp"

namespace sfcsim {

struct DqnConfig {
  int branch_width = 64;
  std::vector<int> hidden_widths = {128, 64};
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_episodes = 300;  // episodes until epsilon_end is reached
  int replay_capacity = 50000;
  int batch_size = 64;
  int target_sync_period = 100;  // gradient updates between hard syncs
  int updates_per_block = 350;
  int episodes_per_block = 20;
  int blocks = 25;
  double learning_rate = 1e-3;
  EncoderConfig encoder;

  double epsilon_at(int episode) const;
};

/// Three dense branches of equal output width, fused by single-head
/// attention over the three branch tokens, then a dense head sized
/// 2|V|+1 for place/uninstall/idle codes.
class DqnNet {
 public:
  DqnNet() = default;
  DqnNet(const DqnConfig& cfg, std::uint64_t init_seed, int action_count = Action::count());

  int action_count() const { return head_.layers.back().out_dim(); }

  const nn::Mlp& branch(int i) const { return branch_[i]; }
  const nn::AttentionBlock& attention() const { return attn_; }
  const nn::Mlp& head() const { return head_; }

  std::vector<float> q_values(const StateTriple& s) const;

  std::vector<nn::Matrix*> parameters();
  std::vector<const nn::Matrix*> parameters() const;

  void save(const std::string& path) const;
  void load(const std::string& path);

  /// Copies all parameters from another net of identical shape.
  void copy_from(const DqnNet& other);

  struct Cache {
    nn::MlpCache branches[3];
    nn::AttentionCache attn;
    nn::MlpCache head;
  };
  std::vector<float> forward_cached(const StateTriple& s, Cache& cache) const;
  /// grads must be shaped like parameters(); accumulates.
  void backward(std::span<const float> dq, const Cache& cache, std::vector<nn::Matrix>& grads) const;

 private:
  nn::Mlp branch_[3];
  nn::AttentionBlock attn_;
  nn::Mlp head_;
};

struct Transition {
  StateTriple state;
  int action = 0;
  float reward = 0.0f;
  StateTriple next_state;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity) : capacity_(capacity) {}

  void push(Transition t);
  size_t size() const { return buf_.size(); }
  const Transition& sample(Rng& rng) const;

 private:
  int capacity_;
  size_t write_ = 0;
  std::vector<Transition> buf_;
};

/// Epsilon-greedy over the q vector; greedy ties break to the lowest code.
Action select_action(std::span<const float> q, double epsilon, Rng& rng);

/// One Huber TD step on a sampled batch; returns the mean loss.
double train_batch(DqnNet& net, const DqnNet& target_net, const std::vector<const Transition*>& batch,
                   nn::Adam& adam, double gamma);

inline void sync_target(const DqnNet& net, DqnNet& target_net) { target_net.copy_from(net); }

/// Greedy (or epsilon-greedy) action policy around a DqnNet.
class DqnPolicy : public ActionPolicy {
 public:
  DqnPolicy(const DqnNet& net, const EncoderConfig& enc, double epsilon, std::uint64_t seed)
      : net_(net), enc_(enc), epsilon_(epsilon), rng_(seed) {}

  Action act(const Environment& env, int dc_id) override {
    const auto q = net_.q_values(encode_state(env, dc_id, enc_));
    return select_action(q, epsilon_, rng_);
  }

 private:
  const DqnNet& net_;
  EncoderConfig enc_;
  double epsilon_;
  Rng rng_;
};

struct TrainingCurvePoint {
  int episode = 0;
  double reward = 0.0;  // total episode reward
  double loss = 0.0;    // most recent batch loss
  double epsilon = 0.0;
};

/// Block-scheduled trainer: collects episodes_per_block episodes with the
/// current policy, then runs updates_per_block gradient updates, repeated
/// `blocks` times. DC selection during training is uniform random. Episodes
/// are seeded from `seed`; per-episode environments come from `base` with
/// the seed replaced.
struct DqnTrainResult {
  std::vector<TrainingCurvePoint> curve;  // one point per episode
  double final_epsilon = 0.0;
};

DqnTrainResult train_dqn(DqnNet& net, const SimConfig& base, const Catalog& catalog,
                         const DqnConfig& cfg, std::uint64_t seed,
                         const std::string& curve_jsonl_path = {});

}  // namespace sfcsim
