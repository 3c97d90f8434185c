#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfcsim/agents/dqn.hpp"
#include "sfcsim/agents/genai.hpp"
#include "sfcsim/catalog.hpp"
#include "sfcsim/network.hpp"
#include "sfcsim/sim/config.hpp"

namespace sfcsim {

enum class AgentKind : int { Heuristic = 0, Drl, GenaiDrl };

const char* agent_name(AgentKind a);
AgentKind agent_from_name(const std::string& name);

struct CheckpointPaths {
  std::string dqn;
  std::string vae;
  std::string value;
};

struct SweepAxes {
  std::vector<AgentKind> agents;       // defaults to the scenario agent
  std::vector<int> dc_counts = {2, 4, 6, 8};
  std::vector<int> request_counts = {1, 2, 3, 4, 5};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  int threads = 0;  // 0 = hardware concurrency
};

struct CollectConfig {
  int target_rows = 5000;
  std::string dataset_path;  // defaults to <out_dir>/dataset.bin
};

/// Everything a CLI run needs. Parsed from a strict JSON file: unknown keys
/// are rejected, invalid values name the offending field.
struct ScenarioConfig {
  SimConfig sim;
  Catalog catalog = default_catalog();
  std::optional<NetworkTopology> topology;  // overrides generated mesh
  AgentKind agent = AgentKind::Heuristic;
  CheckpointPaths checkpoints;
  SweepAxes sweep;
  DqnConfig dqn;
  GenaiConfig genai;
  CollectConfig collect;
  std::string out_dir = "results";

  /// Fills empty checkpoint/dataset paths with out_dir-based defaults.
  void resolve_paths();
};

/// Parses and validates a config file. Throws ConfigError with Errc::Parse
/// for malformed JSON or unknown keys and Errc::Validation for bad values.
ScenarioConfig parse_config(const std::string& path);

/// Same, from an in-memory JSON document.
ScenarioConfig parse_config_text(const std::string& text);

}  // namespace sfcsim
