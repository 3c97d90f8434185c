#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfcsim/exp/scenario.hpp"
#include "sfcsim/metrics.hpp"

namespace sfcsim {

/// Checkpoints needed by an agent kind, loaded once and shared read-only
/// across episode workers.
struct AgentBundle {
  std::optional<DqnNet> dqn;
  std::optional<VaeNet> vae;
  std::optional<ValueNet> value;
};

/// Loads the checkpoints the agent needs; throws CheckpointError.
AgentBundle load_agent_bundle(const ScenarioConfig& cfg, AgentKind agent);

/// One full episode for one sweep cell, deterministic in (cfg, arguments).
RunMetrics run_one_episode(const ScenarioConfig& cfg, const AgentBundle& bundle, AgentKind agent,
                           int dc_count, int request_count, std::uint64_t seed);

struct EpisodeResult {
  AgentKind agent = AgentKind::Heuristic;
  int dc_count = 0;
  int request_count = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;  // set when the cell's checkpoints failed to load
  RunMetrics metrics;
};

struct SweepResult {
  std::vector<EpisodeResult> episodes;  // cartesian order: agent, dc, rc, seed
  bool checkpoint_failure = false;
};

/// Cartesian product of (agents, dc_counts, request_counts, seeds), each cell
/// one episode, run on a worker pool. Checkpoint-load failures mark the
/// affected episodes and the sweep carries on.
SweepResult run_sweep(const ScenarioConfig& cfg);

/// One JSON line per episode (the JSONL schema of the results files).
std::string episode_jsonl(const EpisodeResult& r);

/// Writes one JSONL file per (agent, dc_count, request_count) cell plus
/// summary.csv with per-cell means and standard deviations. Failed episodes
/// are omitted. Returns the list of files written.
std::vector<std::string> export_metrics(const SweepResult& result, const std::string& dir);

}  // namespace sfcsim
