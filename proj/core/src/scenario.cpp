#include "sfcsim/exp/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sfcsim/errors.hpp"

namespace sfcsim {

using nlohmann::json;

namespace {

const char* kAgentNames[] = {"heuristic", "drl", "genai-drl"};

[[noreturn]] void parse_fail(const std::string& what) {
  throw ConfigError(Errc::Parse, what);
}

[[noreturn]] void validation_fail(const std::string& what) {
  throw ConfigError(Errc::Validation, what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) parse_fail("unknown key '" + path + key + "'");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& path, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    parse_fail("field '" + path + key + "' has the wrong type");
  }
}

std::vector<int> get_int_list(const json& obj, const std::string& path, const std::string& key,
                              std::vector<int> fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_array()) parse_fail("field '" + path + key + "' must be an array");
  std::vector<int> out;
  for (const auto& v : obj.at(key)) {
    if (!v.is_number_integer()) parse_fail("field '" + path + key + "' must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

void parse_sim(const json& obj, SimConfig& sim) {
  check_keys(obj, "sim.",
             {"tick_ms", "dc_count", "dc_cpu_range", "dc_storage_gb", "dc_ram_gb", "link_bw_mbps",
              "link_prop_delay_ms", "request_count_multiplier", "max_ticks", "seed"});
  sim.tick_ms = get_or(obj, "sim.", "tick_ms", sim.tick_ms);
  sim.dc_count = get_or(obj, "sim.", "dc_count", sim.dc_count);
  if (obj.contains("dc_cpu_range")) {
    const auto& r = obj.at("dc_cpu_range");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      parse_fail("field 'sim.dc_cpu_range' must be [lo, hi]");
    }
    sim.dc_cpu_lo_ghz = r[0].get<double>();
    sim.dc_cpu_hi_ghz = r[1].get<double>();
  }
  sim.dc_storage_gb = get_or(obj, "sim.", "dc_storage_gb", sim.dc_storage_gb);
  sim.dc_ram_gb = get_or(obj, "sim.", "dc_ram_gb", sim.dc_ram_gb);
  sim.link_bw_mbps = get_or(obj, "sim.", "link_bw_mbps", sim.link_bw_mbps);
  sim.link_prop_delay_ms = get_or(obj, "sim.", "link_prop_delay_ms", sim.link_prop_delay_ms);
  sim.request_count_multiplier =
      get_or(obj, "sim.", "request_count_multiplier", sim.request_count_multiplier);
  sim.max_ticks = get_or(obj, "sim.", "max_ticks", sim.max_ticks);
  sim.seed = get_or(obj, "sim.", "seed", sim.seed);
}

void parse_catalog(const json& obj, Catalog& cat) {
  check_keys(obj, "catalog.", {"vnfs", "sfcs"});
  if (obj.contains("vnfs")) {
    if (!obj.at("vnfs").is_array()) parse_fail("field 'catalog.vnfs' must be an array");
    for (const auto& v : obj.at("vnfs")) {
      check_keys(v, "catalog.vnfs[].", {"type", "cpu_ghz", "storage_gb", "ram_gb", "proc_ms"});
      if (!v.contains("type")) parse_fail("catalog.vnfs entry missing 'type'");
      auto& entry = cat.vnfs[static_cast<size_t>(vnf_index(vnf_from_name(v.at("type").get<std::string>())))];
      entry.cpu_ghz = get_or(v, "catalog.vnfs[].", "cpu_ghz", entry.cpu_ghz);
      entry.storage_gb = get_or(v, "catalog.vnfs[].", "storage_gb", entry.storage_gb);
      entry.ram_gb = get_or(v, "catalog.vnfs[].", "ram_gb", entry.ram_gb);
      entry.proc_ms = get_or(v, "catalog.vnfs[].", "proc_ms", entry.proc_ms);
    }
  }
  if (obj.contains("sfcs")) {
    if (!obj.at("sfcs").is_array()) parse_fail("field 'catalog.sfcs' must be an array");
    for (const auto& s : obj.at("sfcs")) {
      check_keys(s, "catalog.sfcs[].", {"name", "chain", "bw_mbps", "e2e_ms", "bundle"});
      if (!s.contains("name")) parse_fail("catalog.sfcs entry missing 'name'");
      auto& spec = cat.sfcs[static_cast<size_t>(sfc_index(sfc_from_name(s.at("name").get<std::string>())))];
      if (s.contains("chain")) {
        spec.chain.clear();
        for (const auto& v : s.at("chain")) spec.chain.push_back(vnf_from_name(v.get<std::string>()));
      }
      if (s.contains("bw_mbps")) {
        const auto& bw = s.at("bw_mbps");
        if (bw.is_number()) {
          spec.bw_lo_mbps = spec.bw_hi_mbps = bw.get<double>();
        } else if (bw.is_array() && bw.size() == 2) {
          spec.bw_lo_mbps = bw[0].get<double>();
          spec.bw_hi_mbps = bw[1].get<double>();
        } else {
          parse_fail("catalog.sfcs[].bw_mbps must be a number or [lo, hi]");
        }
      }
      spec.e2e_limit_ms = get_or(s, "catalog.sfcs[].", "e2e_ms", spec.e2e_limit_ms);
      if (s.contains("bundle")) {
        const auto& b = s.at("bundle");
        if (!b.is_array() || b.size() != 2) parse_fail("catalog.sfcs[].bundle must be [lo, hi]");
        spec.bundle_lo = b[0].get<int>();
        spec.bundle_hi = b[1].get<int>();
      }
    }
  }
}

NetworkTopology parse_topology(const json& obj) {
  check_keys(obj, "topology.", {"dcs", "links"});
  if (!obj.contains("dcs") || !obj.at("dcs").is_array()) {
    parse_fail("topology requires a 'dcs' array");
  }
  NetworkTopology topo;
  int id = 0;
  for (const auto& d : obj.at("dcs")) {
    check_keys(d, "topology.dcs[].", {"cpu_ghz", "storage_gb", "ram_gb"});
    Datacenter dc;
    dc.id = id++;
    dc.cpu_capacity_ghz = get_or(d, "topology.dcs[].", "cpu_ghz", 64.0);
    dc.storage_capacity_gb = get_or(d, "topology.dcs[].", "storage_gb", 2000.0);
    dc.ram_capacity_gb = get_or(d, "topology.dcs[].", "ram_gb", 256.0);
    topo.dcs.push_back(dc);
  }
  if (!obj.contains("links")) parse_fail("topology requires a 'links' array");
  for (const auto& l : obj.at("links")) {
    check_keys(l, "topology.links[].", {"a", "b", "bw_mbps", "prop_delay_ms"});
    LogicalLink link;
    if (!l.contains("a") || !l.contains("b")) parse_fail("topology.links[] needs 'a' and 'b'");
    link.a = l.at("a").get<int>();
    link.b = l.at("b").get<int>();
    link.bw_capacity_mbps = get_or(l, "topology.links[].", "bw_mbps", 1000.0);
    link.prop_delay_ms = get_or(l, "topology.links[].", "prop_delay_ms", 1.0);
    topo.links.push_back(link);
  }
  topo.index_links();
  return topo;
}

void parse_dqn(const json& obj, DqnConfig& cfg) {
  check_keys(obj, "dqn.",
             {"branch_width", "hidden_widths", "gamma", "epsilon_start", "epsilon_end",
              "epsilon_decay_episodes", "replay_capacity", "batch_size", "target_sync_period",
              "updates_per_block", "episodes_per_block", "blocks", "learning_rate"});
  cfg.branch_width = get_or(obj, "dqn.", "branch_width", cfg.branch_width);
  if (obj.contains("hidden_widths")) cfg.hidden_widths = get_int_list(obj, "dqn.", "hidden_widths", {});
  cfg.gamma = get_or(obj, "dqn.", "gamma", cfg.gamma);
  cfg.epsilon_start = get_or(obj, "dqn.", "epsilon_start", cfg.epsilon_start);
  cfg.epsilon_end = get_or(obj, "dqn.", "epsilon_end", cfg.epsilon_end);
  cfg.epsilon_decay_episodes = get_or(obj, "dqn.", "epsilon_decay_episodes", cfg.epsilon_decay_episodes);
  cfg.replay_capacity = get_or(obj, "dqn.", "replay_capacity", cfg.replay_capacity);
  cfg.batch_size = get_or(obj, "dqn.", "batch_size", cfg.batch_size);
  cfg.target_sync_period = get_or(obj, "dqn.", "target_sync_period", cfg.target_sync_period);
  cfg.updates_per_block = get_or(obj, "dqn.", "updates_per_block", cfg.updates_per_block);
  cfg.episodes_per_block = get_or(obj, "dqn.", "episodes_per_block", cfg.episodes_per_block);
  cfg.blocks = get_or(obj, "dqn.", "blocks", cfg.blocks);
  cfg.learning_rate = get_or(obj, "dqn.", "learning_rate", cfg.learning_rate);
  if (cfg.gamma <= 0.0 || cfg.gamma > 1.0) validation_fail("dqn.gamma must be in (0, 1]");
  if (cfg.epsilon_start < 0 || cfg.epsilon_start > 1 || cfg.epsilon_end < 0 || cfg.epsilon_end > 1) {
    validation_fail("dqn.epsilon bounds must be in [0, 1]");
  }
}

void parse_genai(const json& obj, GenaiConfig& cfg) {
  check_keys(obj, "genai.",
             {"latent_dim", "vae_hidden", "value_hidden", "beta", "vae_learning_rate",
              "value_learning_rate", "batch_size", "vae_epochs", "value_epochs",
              "holdout_fraction", "label_weights", "collect_epsilon"});
  cfg.latent_dim = get_or(obj, "genai.", "latent_dim", cfg.latent_dim);
  if (obj.contains("vae_hidden")) cfg.vae_hidden = get_int_list(obj, "genai.", "vae_hidden", {});
  if (obj.contains("value_hidden")) cfg.value_hidden = get_int_list(obj, "genai.", "value_hidden", {});
  cfg.beta = get_or(obj, "genai.", "beta", cfg.beta);
  cfg.vae_learning_rate = get_or(obj, "genai.", "vae_learning_rate", cfg.vae_learning_rate);
  cfg.value_learning_rate = get_or(obj, "genai.", "value_learning_rate", cfg.value_learning_rate);
  cfg.batch_size = get_or(obj, "genai.", "batch_size", cfg.batch_size);
  cfg.vae_epochs = get_or(obj, "genai.", "vae_epochs", cfg.vae_epochs);
  cfg.value_epochs = get_or(obj, "genai.", "value_epochs", cfg.value_epochs);
  cfg.holdout_fraction = get_or(obj, "genai.", "holdout_fraction", cfg.holdout_fraction);
  cfg.collect_epsilon = get_or(obj, "genai.", "collect_epsilon", cfg.collect_epsilon);
  if (obj.contains("label_weights")) {
    const auto& w = obj.at("label_weights");
    if (!w.is_array() || w.size() != 5) parse_fail("genai.label_weights must be [w1..w5]");
    cfg.label = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>(), w[3].get<double>(),
                 w[4].get<double>()};
  }
  if (cfg.beta < 0) validation_fail("genai.beta must be >= 0");
  if (cfg.latent_dim < 1) validation_fail("genai.latent_dim must be >= 1");
  if (cfg.holdout_fraction <= 0 || cfg.holdout_fraction >= 1) {
    validation_fail("genai.holdout_fraction must be in (0, 1)");
  }
}

}  // namespace

const char* agent_name(AgentKind a) { return kAgentNames[static_cast<int>(a)]; }

AgentKind agent_from_name(const std::string& name) {
  for (int i = 0; i < 3; ++i) {
    if (name == kAgentNames[i]) return static_cast<AgentKind>(i);
  }
  throw ConfigError(Errc::Validation, "unknown agent '" + name + "'");
}

void ScenarioConfig::resolve_paths() {
  if (checkpoints.dqn.empty()) checkpoints.dqn = out_dir + "/dqn.ckpt";
  if (checkpoints.vae.empty()) checkpoints.vae = out_dir + "/vae.ckpt";
  if (checkpoints.value.empty()) checkpoints.value = out_dir + "/value.ckpt";
  if (collect.dataset_path.empty()) collect.dataset_path = out_dir + "/dataset.bin";
}

ScenarioConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(Errc::Parse, e.what());
  }
  if (!doc.is_object()) parse_fail("config root must be an object");
  check_keys(doc, "",
             {"sim", "catalog", "topology", "agent", "checkpoints", "sweep", "dqn", "genai",
              "collect", "out_dir"});

  ScenarioConfig cfg;
  if (doc.contains("sim")) parse_sim(doc.at("sim"), cfg.sim);
  if (doc.contains("catalog")) parse_catalog(doc.at("catalog"), cfg.catalog);
  if (doc.contains("topology")) {
    cfg.topology = parse_topology(doc.at("topology"));
    cfg.sim.dc_count = cfg.topology->dc_count();
  }
  if (doc.contains("agent")) cfg.agent = agent_from_name(doc.at("agent").get<std::string>());
  if (doc.contains("checkpoints")) {
    const auto& c = doc.at("checkpoints");
    check_keys(c, "checkpoints.", {"dqn", "vae", "value"});
    cfg.checkpoints.dqn = get_or(c, "checkpoints.", "dqn", std::string{});
    cfg.checkpoints.vae = get_or(c, "checkpoints.", "vae", std::string{});
    cfg.checkpoints.value = get_or(c, "checkpoints.", "value", std::string{});
  }
  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    check_keys(s, "sweep.", {"agents", "dc_counts", "request_counts", "seeds", "threads"});
    if (s.contains("agents")) {
      cfg.sweep.agents.clear();
      for (const auto& a : s.at("agents")) cfg.sweep.agents.push_back(agent_from_name(a.get<std::string>()));
    }
    cfg.sweep.dc_counts = get_int_list(s, "sweep.", "dc_counts", cfg.sweep.dc_counts);
    cfg.sweep.request_counts = get_int_list(s, "sweep.", "request_counts", cfg.sweep.request_counts);
    if (s.contains("seeds")) {
      cfg.sweep.seeds.clear();
      for (const auto& v : s.at("seeds")) cfg.sweep.seeds.push_back(v.get<std::uint64_t>());
    }
    cfg.sweep.threads = get_or(s, "sweep.", "threads", cfg.sweep.threads);
  }
  if (doc.contains("dqn")) parse_dqn(doc.at("dqn"), cfg.dqn);
  if (doc.contains("genai")) parse_genai(doc.at("genai"), cfg.genai);
  if (doc.contains("collect")) {
    const auto& c = doc.at("collect");
    check_keys(c, "collect.", {"target_rows", "dataset_path", "max_episodes"});
    cfg.collect.target_rows = get_or(c, "collect.", "target_rows", cfg.collect.target_rows);
    cfg.collect.dataset_path = get_or(c, "collect.", "dataset_path", cfg.collect.dataset_path);
    cfg.genai.collect_max_episodes = get_or(c, "collect.", "max_episodes", cfg.genai.collect_max_episodes);
  }
  cfg.out_dir = get_or(doc, "", "out_dir", cfg.out_dir);

  // Cross-field checks after everything is read.
  cfg.sim.validate();
  cfg.catalog.validate();
  if (cfg.topology && cfg.topology->dc_count() < 2) validation_fail("topology needs >= 2 DCs");
  if (cfg.sweep.seeds.empty()) validation_fail("sweep.seeds must not be empty");
  if (cfg.topology &&
      !(cfg.sweep.dc_counts.size() == 1 && cfg.sweep.dc_counts[0] == cfg.topology->dc_count())) {
    // A fixed topology cannot be swept over DC counts.
    cfg.sweep.dc_counts = {cfg.topology->dc_count()};
  }
  for (int rc : cfg.sweep.request_counts) {
    if (rc < 1 || rc > 5) validation_fail("sweep.request_counts entries must be in [1,5]");
  }
  for (int d : cfg.sweep.dc_counts) {
    if (d < 2) validation_fail("sweep.dc_counts entries must be >= 2");
  }
  if (cfg.sweep.agents.empty()) cfg.sweep.agents = {cfg.agent};
  if (cfg.collect.target_rows < 1) validation_fail("collect.target_rows must be >= 1");
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(Errc::Parse, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace sfcsim
