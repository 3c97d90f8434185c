#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sfcsim/agents/dqn.hpp"
#include "sfcsim/agents/genai.hpp"
#include "sfcsim/errors.hpp"
#include "sfcsim/exp/scenario.hpp"
#include "sfcsim/exp/sweep.hpp"

namespace {

using namespace sfcsim;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON scenario config (defaults when omitted)");
  cmd->add_option("--seed", args.seed, "Override sim.seed / training seed");
  cmd->add_option("--out", args.out_dir, "Override out_dir");
}

ScenarioConfig load_scenario(const CommonArgs& args) {
  ScenarioConfig cfg =
      args.config_path.empty() ? ScenarioConfig{} : parse_config(args.config_path);
  if (args.seed) cfg.sim.seed = *args.seed;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  cfg.resolve_paths();
  return cfg;
}

void ensure_out_dir(const ScenarioConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
}

int cmd_simulate(const CommonArgs& args) {
  auto cfg = load_scenario(args);
  ensure_out_dir(cfg);
  const auto bundle = load_agent_bundle(cfg, cfg.agent);
  EpisodeResult r;
  r.agent = cfg.agent;
  r.dc_count = cfg.sim.dc_count;
  r.request_count = cfg.sim.request_count_multiplier;
  r.seed = cfg.sim.seed;
  r.metrics = run_one_episode(cfg, bundle, cfg.agent, r.dc_count, r.request_count, r.seed);
  r.ok = true;
  const std::string line = episode_jsonl(r);
  std::ofstream(cfg.out_dir + "/simulate.jsonl", std::ios::trunc) << line << "\n";
  std::cout << line << "\n";
  return 0;
}

int cmd_collect(const CommonArgs& args) {
  auto cfg = load_scenario(args);
  ensure_out_dir(cfg);
  if (!std::filesystem::exists(cfg.checkpoints.dqn)) {
    throw CheckpointError("dqn checkpoint missing: '" + cfg.checkpoints.dqn + "'");
  }
  DqnNet net(cfg.dqn, 0);
  net.load(cfg.checkpoints.dqn);
  const auto rows =
      collect_dataset(cfg.sim, cfg.catalog, net, cfg.genai, cfg.sim.seed, cfg.collect.target_rows);
  save_dataset(cfg.collect.dataset_path, rows);
  std::cout << "collected " << rows.size() << " rows -> " << cfg.collect.dataset_path << "\n";
  return 0;
}

int cmd_train_dqn(const CommonArgs& args) {
  auto cfg = load_scenario(args);
  ensure_out_dir(cfg);
  DqnNet net(cfg.dqn, derive_seed(cfg.sim.seed, 0x100));
  const auto result =
      train_dqn(net, cfg.sim, cfg.catalog, cfg.dqn, cfg.sim.seed, cfg.out_dir + "/dqn_curve.jsonl");
  net.save(cfg.checkpoints.dqn);
  const size_t n = result.curve.size();
  const size_t decile = std::max<size_t>(1, n / 10);
  auto decile_mean = [&](size_t lo, size_t hi) {
    double s = 0.0;
    for (size_t i = lo; i < hi; ++i) s += result.curve[i].reward;
    return s / static_cast<double>(hi - lo);
  };
  std::cout << "trained " << n << " episodes; first-decile reward " << decile_mean(0, decile)
            << ", last-decile reward " << decile_mean(n - decile, n) << "\n"
            << "checkpoint -> " << cfg.checkpoints.dqn << "\n";
  return 0;
}

int cmd_train_vae(const CommonArgs& args) {
  auto cfg = load_scenario(args);
  ensure_out_dir(cfg);
  const auto rows = load_dataset(cfg.collect.dataset_path);
  VaeNet model(cfg.genai, derive_seed(cfg.sim.seed, 0x200));
  const auto result = train_vae(model, rows, cfg.genai, cfg.sim.seed);
  model.save(cfg.checkpoints.vae);
  std::ofstream curve(cfg.out_dir + "/vae_curve.jsonl", std::ios::trunc);
  for (const auto& p : result.curve) {
    curve << "{\"epoch\":" << p.epoch << ",\"recon\":" << p.train_recon << ",\"kl\":" << p.train_kl
          << ",\"holdout_recon\":" << p.holdout_recon << "}\n";
  }
  std::cout << "holdout recon " << result.initial_holdout_recon << " -> "
            << result.final_holdout_recon << "\ncheckpoint -> " << cfg.checkpoints.vae << "\n";
  return 0;
}

int cmd_train_value(const CommonArgs& args) {
  auto cfg = load_scenario(args);
  ensure_out_dir(cfg);
  const auto rows = load_dataset(cfg.collect.dataset_path);
  VaeNet model(cfg.genai, 0);
  model.load(cfg.checkpoints.vae);
  ValueNet value(cfg.genai, derive_seed(cfg.sim.seed, 0x300));
  const auto result = train_value(value, model, rows, cfg.genai, cfg.sim.seed);
  value.save(cfg.checkpoints.value);
  std::ofstream curve(cfg.out_dir + "/value_curve.jsonl", std::ios::trunc);
  for (size_t i = 0; i < result.epoch_loss.size(); ++i) {
    curve << "{\"epoch\":" << i << ",\"loss\":" << result.epoch_loss[i] << "}\n";
  }
  std::cout << "value loss " << result.initial_loss << " -> " << result.final_loss
            << "\ncheckpoint -> " << cfg.checkpoints.value << "\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args) {
  auto cfg = load_scenario(args);
  ensure_out_dir(cfg);
  cfg.sweep.agents = {cfg.agent};
  cfg.sweep.dc_counts = {cfg.sim.dc_count};
  cfg.sweep.request_counts = {cfg.sim.request_count_multiplier};
  const auto result = run_sweep(cfg);
  const auto files = export_metrics(result, cfg.out_dir);
  for (const auto& f : files) std::cout << f << "\n";
  return result.checkpoint_failure ? 3 : 0;
}

int cmd_sweep(const CommonArgs& args) {
  auto cfg = load_scenario(args);
  ensure_out_dir(cfg);
  const auto result = run_sweep(cfg);
  const auto files = export_metrics(result, cfg.out_dir);
  for (const auto& f : files) std::cout << f << "\n";
  if (result.checkpoint_failure) {
    std::cerr << "one or more agents had unloadable checkpoints\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SFC provisioning simulator and agent trainer"};
  app.require_subcommand(1);

  CommonArgs args;
  int rc = 0;
  auto wire = [&](CLI::App* cmd, int (*fn)(const CommonArgs&)) {
    add_common(cmd, args);
    cmd->callback([&rc, fn, &args] { rc = fn(args); });
  };

  wire(app.add_subcommand("simulate", "Run one episode and print its metrics line"), cmd_simulate);
  wire(app.add_subcommand("collect-dataset", "Collect VAE transition rows with random DC choice"),
       cmd_collect);
  wire(app.add_subcommand("train-dqn", "Train the action net on the configured environment"),
       cmd_train_dqn);
  wire(app.add_subcommand("train-vae", "Train the next-state autoencoder on a dataset"),
       cmd_train_vae);
  wire(app.add_subcommand("train-value", "Train the DC value regressor on frozen embeddings"),
       cmd_train_value);
  wire(app.add_subcommand("evaluate", "Run the configured agent over the seed list"),
       cmd_evaluate);
  wire(app.add_subcommand("sweep", "Run the full agent/DC/request-count/seed grid"), cmd_sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
