#include "sfcsim/agents/genai.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>

#include "sfcsim/errors.hpp"
#include "sfcsim/nn/checkpoint.hpp"
#include "sfcsim/nn/losses.hpp"

namespace sfcsim {

namespace {
constexpr std::uint64_t kCollectEnvStream = 0x41;
constexpr std::uint64_t kCollectDcStream = 0x42;
constexpr std::uint64_t kCollectPolicyStream = 0x43;
constexpr std::uint64_t kSplitStream = 0x44;
constexpr std::uint64_t kNoiseStream = 0x45;
constexpr std::uint64_t kOrderStream = 0x46;
constexpr std::uint64_t kValueOrderStream = 0x47;

constexpr std::uint32_t kDatasetMagic = 0x53444653;  // "SFDS"
constexpr std::uint32_t kDatasetVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw CheckpointError("truncated dataset");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

int allocation_records_at(const SfcRequest& req, int dc_id) {
  int n = 0;
  for (const auto& a : req.allocations) {
    if (a.dc_id == dc_id) ++n;
  }
  if (req.active && req.active->dc_id == dc_id) ++n;
  return n;
}

std::optional<int> last_bound_dc(const SfcRequest& req) {
  if (req.active) return req.active->dc_id;
  if (!req.allocations.empty()) return req.allocations.back().dc_id;
  return std::nullopt;
}
}  // namespace

VaeNet::VaeNet(const GenaiConfig& cfg, std::uint64_t init_seed, int state_dim) {
  Rng rng(init_seed);
  enc_ = nn::Mlp::make(state_dim, cfg.vae_hidden, nn::Activation::Relu, nn::Activation::Relu, rng);
  const int trunk_out = enc_.out_dim();
  mu_ = nn::DenseLayer(trunk_out, cfg.latent_dim, nn::Activation::Linear);
  mu_.init(rng);
  logvar_ = nn::DenseLayer(trunk_out, cfg.latent_dim, nn::Activation::Linear);
  logvar_.init(rng);
  std::vector<int> dec_widths(cfg.vae_hidden.rbegin(), cfg.vae_hidden.rend());
  dec_widths.push_back(state_dim);
  dec_ = nn::Mlp::make(cfg.latent_dim, dec_widths, nn::Activation::Relu, nn::Activation::Linear,
                       rng);
}

std::pair<std::vector<float>, std::vector<float>> VaeNet::encode(std::span<const float> x) const {
  EncodeCache scratch;
  return encode_cached(x, scratch);
}

std::pair<std::vector<float>, std::vector<float>> VaeNet::encode_cached(std::span<const float> x,
                                                                        EncodeCache& cache) const {
  cache.trunk_out = enc_.forward_cached(x, cache.trunk);
  return {mu_.forward_cached(cache.trunk_out, cache.mu),
          logvar_.forward_cached(cache.trunk_out, cache.logvar)};
}

std::vector<float> VaeNet::decode(std::span<const float> z) const {
  DecodeCache scratch;
  return decode_cached(z, scratch);
}

std::vector<float> VaeNet::decode_cached(std::span<const float> z, DecodeCache& cache) const {
  return dec_.forward_cached(z, cache.dec);
}

std::vector<nn::Matrix*> VaeNet::parameters() {
  std::vector<nn::Matrix*> out;
  enc_.collect_params(out);
  out.push_back(&mu_.w);
  out.push_back(&mu_.b);
  out.push_back(&logvar_.w);
  out.push_back(&logvar_.b);
  dec_.collect_params(out);
  return out;
}

std::vector<nn::Matrix*> VaeNet::encoder_parameters() {
  std::vector<nn::Matrix*> out;
  enc_.collect_params(out);
  out.push_back(&mu_.w);
  out.push_back(&mu_.b);
  out.push_back(&logvar_.w);
  out.push_back(&logvar_.b);
  return out;
}

std::vector<nn::Matrix*> VaeNet::decoder_parameters() {
  std::vector<nn::Matrix*> out;
  dec_.collect_params(out);
  return out;
}

void VaeNet::save(const std::string& path) const {
  auto params = const_cast<VaeNet*>(this)->parameters();
  nn::save_checkpoint(path, params);
}

void VaeNet::load(const std::string& path) {
  auto params = parameters();
  nn::load_checkpoint_into(path, params);
}

std::vector<float> VaeNet::decoder_backward(std::span<const float> dxhat, const DecodeCache& cache,
                                            std::vector<nn::Matrix>& grads) {
  const size_t offset = static_cast<size_t>(enc_.param_count()) + 4;
  return dec_.backward(dxhat, cache.dec,
                       std::span<nn::Matrix>(grads).subspan(offset, static_cast<size_t>(dec_.param_count())));
}

void VaeNet::encoder_backward(std::span<const float> dmu, std::span<const float> dlogvar,
                              const EncodeCache& cache, std::vector<nn::Matrix>& grads) {
  const size_t trunk_n = static_cast<size_t>(enc_.param_count());
  std::span<nn::Matrix> all(grads);
  const auto dtrunk_mu = mu_.backward(dmu, cache.mu, grads[trunk_n], grads[trunk_n + 1]);
  const auto dtrunk_lv = logvar_.backward(dlogvar, cache.logvar, grads[trunk_n + 2], grads[trunk_n + 3]);
  std::vector<float> dtrunk(dtrunk_mu.size());
  for (size_t i = 0; i < dtrunk.size(); ++i) dtrunk[i] = dtrunk_mu[i] + dtrunk_lv[i];
  enc_.backward(dtrunk, cache.trunk, all.subspan(0, trunk_n));
}

ValueNet::ValueNet(const GenaiConfig& cfg, std::uint64_t init_seed) {
  Rng rng(init_seed);
  std::vector<int> widths = cfg.value_hidden;
  widths.push_back(1);
  mlp_ = nn::Mlp::make(cfg.latent_dim, widths, nn::Activation::Relu, nn::Activation::Linear, rng);
}

double ValueNet::score(std::span<const float> embedding) const {
  return mlp_.forward(embedding)[0];
}

std::vector<nn::Matrix*> ValueNet::parameters() {
  std::vector<nn::Matrix*> out;
  mlp_.collect_params(out);
  return out;
}

void ValueNet::save(const std::string& path) const {
  auto params = const_cast<ValueNet*>(this)->parameters();
  nn::save_checkpoint(path, params);
}

void ValueNet::load(const std::string& path) {
  auto params = parameters();
  nn::load_checkpoint_into(path, params);
}

double compute_value_label(const Environment& before, const Environment& after, int dc_id,
                           const ValueLabelWeights& w, const EncoderConfig&) {
  const auto& cat = after.catalog();

  int allocations = 0;
  for (size_t i = 0; i < after.requests().size(); ++i) {
    allocations += allocation_records_at(after.requests()[i], dc_id) -
                   allocation_records_at(before.requests()[i], dc_id);
  }

  int drops = 0;
  for (size_t i = 0; i < after.requests().size(); ++i) {
    const auto& a = after.requests()[i];
    const auto& b = before.requests()[i];
    if (a.status != SfcStatus::Dropped || b.status == SfcStatus::Dropped) continue;
    const auto dc = last_bound_dc(b);
    if (dc && *dc == dc_id) ++drops;
  }

  double urgency = 0.0;
  for (const auto& req : after.requests()) {
    if (req.status != SfcStatus::Pending || !after.allocatable(req, dc_id)) continue;
    const double limit = cat.sfc(req.type).e2e_limit_ms;
    const double slack_frac = std::clamp(req.slack_ms(cat) / limit, 0.0, 1.0);
    urgency += 1.0 - slack_frac;
  }

  const auto& dc = after.topology().dcs[static_cast<size_t>(dc_id)];
  const double resource =
      (dc.free_cpu_fraction(cat) + dc.free_storage_fraction(cat) + dc.free_ram_fraction(cat)) / 3.0;

  const auto incident = after.topology().incident_links(dc_id);
  double bw = 1.0;
  if (!incident.empty()) {
    bw = 0.0;
    for (int li : incident) bw += after.topology().links[static_cast<size_t>(li)].free_fraction();
    bw /= static_cast<double>(incident.size());
  }

  return w.w1 * allocations + w.w2 * urgency + w.w3 * resource + w.w4 * bw - w.w5 * drops;
}

std::vector<TransitionRow> collect_dataset(const SimConfig& base, const Catalog& catalog,
                                           const DqnNet& action_net, const GenaiConfig& cfg,
                                           std::uint64_t seed, int target_rows) {
  std::vector<TransitionRow> rows;
  rows.reserve(static_cast<size_t>(target_rows));
  Rng dc_rng(derive_seed(seed, kCollectDcStream));
  DqnPolicy policy(action_net, cfg.encoder, cfg.collect_epsilon,
                   derive_seed(seed, kCollectPolicyStream));

  for (int episode = 0; episode < cfg.collect_max_episodes; ++episode) {
    SimConfig ecfg = base;
    ecfg.seed = derive_seed(seed, kCollectEnvStream + static_cast<std::uint64_t>(episode));
    Environment env(ecfg, catalog);
    while (env.live_count() > 0 && env.tick() < ecfg.max_ticks) {
      const int dc = static_cast<int>(dc_rng.uniform_int(0, env.topology().dc_count() - 1));
      const Environment before = env;
      const auto state = encode_dc_state(env, dc, cfg.encoder);
      const Action a = policy.act(env, dc);
      env.step(dc, a);
      TransitionRow row;
      row.state = state;
      row.next_state = encode_dc_state(env, dc, cfg.encoder);
      row.value = static_cast<float>(compute_value_label(before, env, dc, cfg.label, cfg.encoder));
      rows.push_back(std::move(row));
      if (static_cast<int>(rows.size()) >= target_rows) return rows;
    }
  }
  throw SimError(Errc::DatasetTooSmall, "collected " + std::to_string(rows.size()) + " of " +
                                            std::to_string(target_rows) + " rows within " +
                                            std::to_string(cfg.collect_max_episodes) + " episodes");
}

void save_dataset(const std::string& path, const std::vector<TransitionRow>& rows) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CheckpointError("cannot open '" + path + "' for writing");
  const int dim = rows.empty() ? kDcStateDim : static_cast<int>(rows.front().state.size());
  put_u32(os, kDatasetMagic);
  put_u32(os, kDatasetVersion);
  put_u32(os, static_cast<std::uint32_t>(rows.size()));
  put_u32(os, static_cast<std::uint32_t>(dim));
  auto put_f32 = [&os](float f) { put_u32(os, std::bit_cast<std::uint32_t>(f)); };
  for (const auto& r : rows) {
    for (float f : r.state) put_f32(f);
    for (float f : r.next_state) put_f32(f);
    put_f32(r.value);
  }
  if (!os) throw CheckpointError("write failed for '" + path + "'");

  std::ofstream schema(path + ".schema.txt", std::ios::trunc);
  schema << "dataset: " << path << "\n"
         << "header: u32 magic 'SFDS', u32 version=" << kDatasetVersion
         << ", u32 row_count, u32 state_dim (little-endian)\n"
         << "row: state_dim f32 state, state_dim f32 next_state, 1 f32 value\n"
         << "state layout (" << dim << " floats): 17 DC features "
         << "(free cpu/storage/ram fractions; 6 installed counts; 6 busy counts; "
         << "mean and min incident-link free-bw fractions) followed by 3 floats per "
         << "SFC type (allocatable pending count, min normalized slack, mean "
         << "normalized bandwidth demand) in catalog order\n";
}

std::vector<TransitionRow> load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open '" + path + "'");
  if (get_u32(is) != kDatasetMagic) throw CheckpointError("bad magic in '" + path + "'");
  const auto version = get_u32(is);
  if (version != kDatasetVersion) {
    throw CheckpointError("unsupported dataset version " + std::to_string(version));
  }
  const auto count = get_u32(is);
  const auto dim = get_u32(is);
  auto get_f32 = [&is] { return std::bit_cast<float>(get_u32(is)); };
  std::vector<TransitionRow> rows(count);
  for (auto& r : rows) {
    r.state.resize(dim);
    r.next_state.resize(dim);
    for (auto& f : r.state) f = get_f32();
    for (auto& f : r.next_state) f = get_f32();
    r.value = get_f32();
  }
  return rows;
}

namespace {

double holdout_recon(const VaeNet& model, const std::vector<TransitionRow>& rows,
                     std::span<const size_t> idx) {
  if (idx.empty()) return 0.0;
  double sum = 0.0;
  for (size_t i : idx) {
    const auto [mu, logvar] = model.encode(rows[i].state);
    sum += nn::mse(model.decode(mu), rows[i].next_state);
  }
  return sum / static_cast<double>(idx.size());
}

}  // namespace

VaeTrainResult train_vae(VaeNet& model, const std::vector<TransitionRow>& dataset,
                         const GenaiConfig& cfg, std::uint64_t seed) {
  if (dataset.empty()) throw SimError(Errc::Validation, "empty VAE dataset");

  std::vector<size_t> idx(dataset.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng split_rng(derive_seed(seed, kSplitStream));
  for (size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[static_cast<size_t>(split_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  }
  const size_t holdout_n =
      std::min(dataset.size() - 1,
               static_cast<size_t>(std::ceil(cfg.holdout_fraction * static_cast<double>(dataset.size()))));
  std::vector<size_t> train_idx(idx.begin(), idx.end() - static_cast<long>(holdout_n));
  std::vector<size_t> hold_idx(idx.end() - static_cast<long>(holdout_n), idx.end());

  VaeTrainResult result;
  result.initial_holdout_recon = holdout_recon(model, dataset, hold_idx);

  auto params = model.parameters();
  nn::Adam adam({.lr = cfg.vae_learning_rate}, params);
  Rng noise_rng(derive_seed(seed, kNoiseStream));
  Rng order_rng(derive_seed(seed, kOrderStream));
  const int latent = model.latent_dim();

  for (int epoch = 0; epoch < cfg.vae_epochs; ++epoch) {
    for (size_t i = train_idx.size(); i > 1; --i) {
      std::swap(train_idx[i - 1],
                train_idx[static_cast<size_t>(order_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
    double recon_sum = 0.0, kl_sum = 0.0;
    size_t done = 0;
    while (done < train_idx.size()) {
      const size_t batch = std::min(static_cast<size_t>(cfg.batch_size), train_idx.size() - done);
      auto grads = nn::make_like(params);
      const double inv_b = 1.0 / static_cast<double>(batch);
      for (size_t k = 0; k < batch; ++k) {
        const auto& row = dataset[train_idx[done + k]];
        VaeNet::EncodeCache ec;
        VaeNet::DecodeCache dc;
        const auto [mu, logvar] = model.encode_cached(row.state, ec);
        std::vector<float> noise(static_cast<size_t>(latent));
        for (auto& n : noise) n = static_cast<float>(noise_rng.normal());
        const auto z = nn::reparameterize(mu, logvar, noise);
        const auto xhat = model.decode_cached(z, dc);
        recon_sum += nn::mse(xhat, row.next_state);
        kl_sum += nn::kl_gaussian(mu, logvar);

        auto dxhat = nn::mse_grad(xhat, row.next_state);
        for (auto& g : dxhat) g = static_cast<float>(g * inv_b);
        const auto dz = model.decoder_backward(dxhat, dc, grads);
        std::vector<float> dmu(static_cast<size_t>(latent), 0.0f);
        std::vector<float> dlogvar(static_cast<size_t>(latent), 0.0f);
        nn::reparameterize_grad(dz, logvar, noise, dmu, dlogvar);
        nn::kl_gaussian_grad(mu, logvar, cfg.beta * inv_b, dmu, dlogvar);
        model.encoder_backward(dmu, dlogvar, ec, grads);
      }
      adam.step(params, grads);
      done += batch;
    }
    const double recon = recon_sum / static_cast<double>(train_idx.size());
    const double kl = kl_sum / static_cast<double>(train_idx.size());
    if (!std::isfinite(recon) || !std::isfinite(kl)) {
      throw SimError(Errc::Diverged, "VAE loss non-finite at epoch " + std::to_string(epoch));
    }
    result.curve.push_back({epoch, recon, kl, holdout_recon(model, dataset, hold_idx)});
  }
  result.final_holdout_recon = holdout_recon(model, dataset, hold_idx);
  return result;
}

ValueTrainResult train_value(ValueNet& value_net, const VaeNet& model,
                             const std::vector<TransitionRow>& dataset, const GenaiConfig& cfg,
                             std::uint64_t seed) {
  if (dataset.empty()) throw SimError(Errc::Validation, "empty value dataset");

  // Frozen encoder: embeddings are precomputed, gradients never reach it.
  std::vector<std::vector<float>> emb(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) emb[i] = model.encode(dataset[i].state).first;

  auto params = value_net.parameters();
  nn::Adam adam({.lr = cfg.value_learning_rate}, params);
  Rng order_rng(derive_seed(seed, kValueOrderStream));

  auto full_loss = [&] {
    double sum = 0.0;
    for (size_t i = 0; i < dataset.size(); ++i) {
      const double d = value_net.score(emb[i]) - dataset[i].value;
      sum += d * d;
    }
    return sum / static_cast<double>(dataset.size());
  };

  ValueTrainResult result;
  result.initial_loss = full_loss();

  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.value_epochs; ++epoch) {
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1],
                order[static_cast<size_t>(order_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
    double epoch_sum = 0.0;
    size_t done = 0;
    while (done < order.size()) {
      const size_t batch = std::min(static_cast<size_t>(cfg.batch_size), order.size() - done);
      auto grads = nn::make_like(params);
      const double inv_b = 1.0 / static_cast<double>(batch);
      for (size_t k = 0; k < batch; ++k) {
        const auto& row = dataset[order[done + k]];
        nn::MlpCache cache;
        const auto out = value_net.mlp().forward_cached(emb[order[done + k]], cache);
        const double residual = static_cast<double>(out[0]) - row.value;
        epoch_sum += residual * residual;
        const std::vector<float> dy = {static_cast<float>(2.0 * residual * inv_b)};
        value_net.mlp().backward(dy, cache, grads);
      }
      adam.step(params, grads);
      done += batch;
    }
    const double mean = epoch_sum / static_cast<double>(order.size());
    if (!std::isfinite(mean)) {
      throw SimError(Errc::Diverged, "value loss non-finite at epoch " + std::to_string(epoch));
    }
    result.epoch_loss.push_back(mean);
  }
  result.final_loss = full_loss();
  return result;
}

int select_dc(const Environment& env, const VaeNet& model, const ValueNet& value_net,
              const EncoderConfig& enc) {
  int best = 0;
  double best_score = 0.0;
  for (int d = 0; d < env.topology().dc_count(); ++d) {
    const auto state = encode_dc_state(env, d, enc);
    const double score = value_net.score(model.encode(state).first);
    if (d == 0 || score > best_score) {
      best = d;
      best_score = score;
    }
  }
  return best;
}

}  // namespace sfcsim
