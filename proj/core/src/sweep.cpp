#include "sfcsim/exp/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "sfcsim/agents/heuristic.hpp"
#include "sfcsim/errors.hpp"

namespace sfcsim {

using nlohmann::ordered_json;

namespace {
constexpr std::uint64_t kDrlDcStream = 0x51;
constexpr std::uint64_t kDrlPolicyStream = 0x52;

void require_file(const std::string& path, const char* what) {
  if (!std::filesystem::exists(path)) {
    throw CheckpointError(std::string(what) + " checkpoint missing: '" + path + "'");
  }
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}
}  // namespace

AgentBundle load_agent_bundle(const ScenarioConfig& cfg, AgentKind agent) {
  AgentBundle bundle;
  if (agent == AgentKind::Heuristic) return bundle;
  require_file(cfg.checkpoints.dqn, "dqn");
  bundle.dqn.emplace(cfg.dqn, /*init_seed=*/0);
  bundle.dqn->load(cfg.checkpoints.dqn);
  if (agent == AgentKind::GenaiDrl) {
    require_file(cfg.checkpoints.vae, "vae");
    require_file(cfg.checkpoints.value, "value");
    bundle.vae.emplace(cfg.genai, /*init_seed=*/0);
    bundle.vae->load(cfg.checkpoints.vae);
    bundle.value.emplace(cfg.genai, /*init_seed=*/0);
    bundle.value->load(cfg.checkpoints.value);
  }
  return bundle;
}

RunMetrics run_one_episode(const ScenarioConfig& cfg, const AgentBundle& bundle, AgentKind agent,
                           int dc_count, int request_count, std::uint64_t seed) {
  SimConfig sim = cfg.sim;
  sim.dc_count = dc_count;
  sim.request_count_multiplier = request_count;
  sim.seed = seed;

  auto make_env = [&] {
    return cfg.topology ? Environment(sim, cfg.catalog, *cfg.topology)
                        : Environment(sim, cfg.catalog);
  };
  Environment env = make_env();

  if (agent == AgentKind::Heuristic) {
    HeuristicPolicy policy;
    return run_episode(env, policy);
  }

  DqnPolicy action(*bundle.dqn, cfg.dqn.encoder, /*epsilon=*/0.0,
                   derive_seed(seed, kDrlPolicyStream));
  if (agent == AgentKind::Drl) {
    RandomDcSelector selector(derive_seed(seed, kDrlDcStream));
    CompositePolicy policy(selector, action);
    return run_episode(env, policy);
  }
  GenaiDcSelector selector(*bundle.vae, *bundle.value, cfg.genai.encoder);
  CompositePolicy policy(selector, action);
  return run_episode(env, policy);
}

SweepResult run_sweep(const ScenarioConfig& cfg) {
  SweepResult result;
  std::map<AgentKind, AgentBundle> bundles;
  std::map<AgentKind, std::string> load_errors;
  for (AgentKind a : cfg.sweep.agents) {
    if (bundles.contains(a) || load_errors.contains(a)) continue;
    try {
      bundles.emplace(a, load_agent_bundle(cfg, a));
    } catch (const CheckpointError& e) {
      load_errors.emplace(a, e.what());
      result.checkpoint_failure = true;
    }
  }

  for (AgentKind a : cfg.sweep.agents) {
    for (int dc : cfg.sweep.dc_counts) {
      for (int rc : cfg.sweep.request_counts) {
        for (std::uint64_t seed : cfg.sweep.seeds) {
          EpisodeResult r;
          r.agent = a;
          r.dc_count = dc;
          r.request_count = rc;
          r.seed = seed;
          if (auto it = load_errors.find(a); it != load_errors.end()) r.error = it->second;
          result.episodes.push_back(std::move(r));
        }
      }
    }
  }

  unsigned requested = cfg.sweep.threads > 0 ? static_cast<unsigned>(cfg.sweep.threads)
                                             : std::thread::hardware_concurrency();
  if (requested == 0) requested = 1;
  const unsigned workers =
      std::min<unsigned>(requested, static_cast<unsigned>(result.episodes.size()));

  std::atomic<size_t> next{0};
  auto work = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= result.episodes.size()) return;
      auto& r = result.episodes[i];
      if (!r.error.empty()) continue;
      r.metrics = run_one_episode(cfg, bundles.at(r.agent), r.agent, r.dc_count, r.request_count,
                                  r.seed);
      r.ok = true;
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return result;
}

std::string episode_jsonl(const EpisodeResult& r) {
  ordered_json line;
  line["agent"] = agent_name(r.agent);
  line["dc_count"] = r.dc_count;
  line["request_count"] = r.request_count;
  line["seed"] = r.seed;
  const auto& m = r.metrics;
  const int gen = m.total_generated();
  if (gen > 0) {
    line["acc_ratio"] = static_cast<double>(m.total_accepted()) / gen;
  } else {
    line["acc_ratio"] = nullptr;
  }
  ordered_json per_type, e2e, acc, drop, genj;
  for (int s = 0; s < kSfcCount; ++s) {
    const char* name = sfc_name(static_cast<SfcTypeId>(s));
    per_type[name] = acceptance_ratio(m, static_cast<SfcTypeId>(s));
    const auto& samples = m.e2e_samples_ms[static_cast<size_t>(s)];
    if (samples.empty()) {
      e2e[name] = nullptr;  // dropped requests are excluded, so no accepted => null
    } else {
      double sum = 0.0;
      for (double v : samples) sum += v;
      e2e[name] = sum / static_cast<double>(samples.size());
    }
    acc[name] = m.accepted[s];
    drop[name] = m.dropped[s];
    genj[name] = m.generated[s];
  }
  line["per_type_acc"] = per_type;
  line["mean_e2e_ms"] = e2e;
  line["throughput_gbps"] = throughput_gbps(m);
  line["accepted"] = acc;
  line["dropped"] = drop;
  line["generated"] = genj;
  line["tick_budget_exhausted"] = m.tick_budget_exhausted;
  return line.dump();
}

std::vector<std::string> export_metrics(const SweepResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;

  // Group episodes per cell preserving cartesian order.
  std::map<std::tuple<int, int, int>, std::vector<const EpisodeResult*>> cells;
  for (const auto& e : result.episodes) {
    if (!e.ok) continue;
    cells[{static_cast<int>(e.agent), e.dc_count, e.request_count}].push_back(&e);
  }

  for (const auto& [key, episodes] : cells) {
    const auto [agent, dc, rc] = key;
    const std::string path = dir + "/" + agent_name(static_cast<AgentKind>(agent)) + "_dc" +
                             std::to_string(dc) + "_rc" + std::to_string(rc) + ".jsonl";
    std::ofstream os(path, std::ios::trunc);
    for (const auto* e : episodes) os << episode_jsonl(*e) << "\n";
    written.push_back(path);
  }

  const std::string csv_path = dir + "/summary.csv";
  std::ofstream csv(csv_path, std::ios::trunc);
  csv << "agent,dc_count,request_count,n_seeds,acc_ratio_mean,acc_ratio_std,"
         "throughput_gbps_mean,throughput_gbps_std";
  for (int s = 0; s < kSfcCount; ++s) csv << ",acc_mean_" << sfc_name(static_cast<SfcTypeId>(s));
  csv << "\n";
  for (const auto& [key, episodes] : cells) {
    const auto [agent, dc, rc] = key;
    std::vector<double> ratios, thr;
    std::vector<double> per_type[kSfcCount];
    for (const auto* e : episodes) {
      const int gen = e->metrics.total_generated();
      if (gen > 0) ratios.push_back(static_cast<double>(e->metrics.total_accepted()) / gen);
      thr.push_back(throughput_gbps(e->metrics));
      for (int s = 0; s < kSfcCount; ++s) {
        per_type[s].push_back(acceptance_ratio(e->metrics, static_cast<SfcTypeId>(s)));
      }
    }
    csv << agent_name(static_cast<AgentKind>(agent)) << "," << dc << "," << rc << ","
        << episodes.size() << "," << fmt(mean_of(ratios)) << "," << fmt(stddev_of(ratios)) << ","
        << fmt(mean_of(thr)) << "," << fmt(stddev_of(thr));
    for (int s = 0; s < kSfcCount; ++s) csv << "," << fmt(mean_of(per_type[s]));
    csv << "\n";
  }
  written.push_back(csv_path);
  return written;
}

}  // namespace sfcsim
