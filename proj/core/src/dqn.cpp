#include "sfcsim/agents/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sfcsim/errors.hpp"
#include "sfcsim/nn/checkpoint.hpp"
#include "sfcsim/nn/losses.hpp"

namespace sfcsim {

namespace {
constexpr std::uint64_t kEnvStream = 0x31;
constexpr std::uint64_t kPolicyStream = 0x32;
constexpr std::uint64_t kReplayStream = 0x33;
constexpr std::uint64_t kDcStream = 0x34;
}  // namespace

double DqnConfig::epsilon_at(int episode) const {
  if (epsilon_decay_episodes <= 0) return epsilon_end;
  const double ratio = std::min(1.0, static_cast<double>(episode) / epsilon_decay_episodes);
  // exponential interpolation from start to end
  return epsilon_start * std::pow(epsilon_end / epsilon_start, ratio);
}

DqnNet::DqnNet(const DqnConfig& cfg, std::uint64_t init_seed, int action_count) {
  Rng rng(init_seed);
  const int dims[3] = {kBranch1Dim, kBranch2Dim, kBranch3Dim};
  for (int i = 0; i < 3; ++i) {
    branch_[i] = nn::Mlp::make(dims[i], {cfg.branch_width}, nn::Activation::Relu,
                               nn::Activation::Relu, rng);
  }
  attn_ = nn::AttentionBlock(cfg.branch_width);
  attn_.init(rng);
  std::vector<int> head_widths = cfg.hidden_widths;
  head_widths.push_back(action_count);
  head_ = nn::Mlp::make(3 * cfg.branch_width, head_widths, nn::Activation::Relu,
                        nn::Activation::Linear, rng);
}

std::vector<float> DqnNet::q_values(const StateTriple& s) const {
  Cache scratch;
  return forward_cached(s, scratch);
}

std::vector<float> DqnNet::forward_cached(const StateTriple& s, Cache& cache) const {
  std::vector<std::vector<float>> tokens(3);
  tokens[0] = branch_[0].forward_cached(s.branch1, cache.branches[0]);
  tokens[1] = branch_[1].forward_cached(s.branch2, cache.branches[1]);
  tokens[2] = branch_[2].forward_cached(s.branch3, cache.branches[2]);
  const auto mixed = attn_.forward_cached(tokens, cache.attn);
  std::vector<float> flat;
  flat.reserve(mixed.size() * mixed.front().size());
  for (const auto& tok : mixed) flat.insert(flat.end(), tok.begin(), tok.end());
  return head_.forward_cached(flat, cache.head);
}

void DqnNet::backward(std::span<const float> dq, const Cache& cache,
                      std::vector<nn::Matrix>& grads) const {
  // grads layout: branch0, branch1, branch2, attention, head
  const int nb0 = branch_[0].param_count();
  const int nb1 = branch_[1].param_count();
  const int nb2 = branch_[2].param_count();
  const int na = nn::AttentionBlock::param_count();
  std::span<nn::Matrix> all(grads);

  const auto dflat = head_.backward(dq, cache.head, all.subspan(static_cast<size_t>(nb0 + nb1 + nb2 + na)));
  const int width = attn_.width();
  std::vector<std::vector<float>> dmixed(3);
  for (int i = 0; i < 3; ++i) {
    dmixed[static_cast<size_t>(i)].assign(dflat.begin() + static_cast<long>(i) * width,
                                          dflat.begin() + static_cast<long>(i + 1) * width);
  }
  const auto dtokens =
      attn_.backward(dmixed, cache.attn, all.subspan(static_cast<size_t>(nb0 + nb1 + nb2), static_cast<size_t>(na)));
  branch_[0].backward(dtokens[0], cache.branches[0], all.subspan(0, static_cast<size_t>(nb0)));
  branch_[1].backward(dtokens[1], cache.branches[1], all.subspan(static_cast<size_t>(nb0), static_cast<size_t>(nb1)));
  branch_[2].backward(dtokens[2], cache.branches[2],
                      all.subspan(static_cast<size_t>(nb0 + nb1), static_cast<size_t>(nb2)));
}

std::vector<nn::Matrix*> DqnNet::parameters() {
  std::vector<nn::Matrix*> out;
  for (auto& b : branch_) b.collect_params(out);
  attn_.collect_params(out);
  head_.collect_params(out);
  return out;
}

std::vector<const nn::Matrix*> DqnNet::parameters() const {
  auto mut = const_cast<DqnNet*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

void DqnNet::save(const std::string& path) const { nn::save_checkpoint(path, parameters()); }

void DqnNet::load(const std::string& path) {
  auto params = parameters();
  nn::load_checkpoint_into(path, params);
}

void DqnNet::copy_from(const DqnNet& other) {
  auto dst = parameters();
  auto src = other.parameters();
  if (dst.size() != src.size()) throw SimError(Errc::ShapeMismatch, "dqn copy");
  for (size_t i = 0; i < dst.size(); ++i) {
    if (!dst[i]->same_shape(*src[i])) throw SimError(Errc::ShapeMismatch, "dqn copy shape");
    dst[i]->data = src[i]->data;
  }
}

void ReplayBuffer::push(Transition t) {
  if (static_cast<int>(buf_.size()) < capacity_) {
    buf_.push_back(std::move(t));
  } else {
    buf_[write_] = std::move(t);
  }
  write_ = (write_ + 1) % static_cast<size_t>(capacity_);
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
  return buf_[static_cast<size_t>(rng.uniform_int(0, static_cast<std::int64_t>(buf_.size()) - 1))];
}

Action select_action(std::span<const float> q, double epsilon, Rng& rng) {
  if (epsilon > 0.0 && rng.real01() < epsilon) {
    return {static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(q.size()) - 1))};
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i) {
    if (q[static_cast<size_t>(i)] > q[static_cast<size_t>(best)]) best = i;
  }
  return {best};
}

double train_batch(DqnNet& net, const DqnNet& target_net,
                   const std::vector<const Transition*>& batch, nn::Adam& adam, double gamma) {
  if (batch.empty()) throw SimError(Errc::Validation, "empty training batch");
  auto params = net.parameters();
  auto grads = nn::make_like(params);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;
  for (const auto* t : batch) {
    DqnNet::Cache cache;
    const auto q = net.forward_cached(t->state, cache);
    double target = t->reward;
    if (!t->terminal) {
      const auto qn = target_net.q_values(t->next_state);
      target += gamma * *std::max_element(qn.begin(), qn.end());
    }
    const double residual = static_cast<double>(q[static_cast<size_t>(t->action)]) - target;
    loss_sum += nn::huber(residual);
    std::vector<float> dq(q.size(), 0.0f);
    dq[static_cast<size_t>(t->action)] = static_cast<float>(nn::huber_grad(residual) * inv_n);
    net.backward(dq, cache, grads);
  }
  adam.step(params, grads);
  return loss_sum * inv_n;
}

DqnTrainResult train_dqn(DqnNet& net, const SimConfig& base, const Catalog& catalog,
                         const DqnConfig& cfg, std::uint64_t seed,
                         const std::string& curve_jsonl_path) {
  DqnNet target = net;
  ReplayBuffer replay(cfg.replay_capacity);
  nn::Adam adam({.lr = cfg.learning_rate}, net.parameters());
  Rng replay_rng(derive_seed(seed, kReplayStream));
  Rng dc_rng(derive_seed(seed, kDcStream));
  Rng policy_rng(derive_seed(seed, kPolicyStream));

  DqnTrainResult result;
  std::ofstream curve_out;
  if (!curve_jsonl_path.empty()) {
    curve_out.open(curve_jsonl_path, std::ios::trunc);
    if (!curve_out) throw SimError(Errc::Validation, "cannot open " + curve_jsonl_path);
  }

  int episode = 0;
  double last_loss = 0.0;
  int updates_done = 0;
  for (int block = 0; block < cfg.blocks; ++block) {
    for (int e = 0; e < cfg.episodes_per_block; ++e, ++episode) {
      const double eps = cfg.epsilon_at(episode);
      SimConfig ecfg = base;
      ecfg.seed = derive_seed(seed, kEnvStream + static_cast<std::uint64_t>(episode));
      Environment env(ecfg, catalog);

      double ep_reward = 0.0;
      long steps = 0;
      std::optional<Transition> pendingTransition;
      while (env.live_count() > 0 && env.tick() < ecfg.max_ticks) {
        const int dc = static_cast<int>(dc_rng.uniform_int(0, env.topology().dc_count() - 1));
        const auto state = encode_state(env, dc, cfg.encoder);
        if (pendingTransition) {
          pendingTransition->next_state = state;
          replay.push(std::move(*pendingTransition));
        }
        const auto q = net.q_values(state);
        const Action a = select_action(q, eps, policy_rng);
        const auto events = env.step(dc, a);
        const double r = reward_of(events);
        ep_reward += r;
        ++steps;
        pendingTransition = Transition{state, a.code, static_cast<float>(r), {}, false};
        if (env.live_count() == 0) {
          pendingTransition->terminal = true;
          pendingTransition->next_state = state;  // unused at terminal
          replay.push(std::move(*pendingTransition));
          pendingTransition.reset();
        }
      }
      if (pendingTransition) {
        // tick budget ran out; close the transition without bootstrapping
        pendingTransition->terminal = true;
        pendingTransition->next_state = pendingTransition->state;
        replay.push(std::move(*pendingTransition));
      }

      result.curve.push_back({episode, steps > 0 ? ep_reward : 0.0, last_loss, eps});
      if (curve_out) {
        curve_out << "{\"episode\":" << episode << ",\"reward\":" << ep_reward
                  << ",\"loss\":" << last_loss << ",\"epsilon\":" << eps << "}\n";
      }
    }

    if (replay.size() < static_cast<size_t>(cfg.batch_size)) continue;
    for (int u = 0; u < cfg.updates_per_block; ++u) {
      std::vector<const Transition*> batch;
      batch.reserve(static_cast<size_t>(cfg.batch_size));
      for (int i = 0; i < cfg.batch_size; ++i) batch.push_back(&replay.sample(replay_rng));
      last_loss = train_batch(net, target, batch, adam, cfg.gamma);
      ++updates_done;
      if (updates_done % cfg.target_sync_period == 0) sync_target(net, target);
    }
  }
  result.final_epsilon = cfg.epsilon_at(episode);
  return result;
}

}  // namespace sfcsim
