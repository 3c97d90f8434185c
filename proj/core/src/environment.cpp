#include "sfcsim/sim/environment.hpp"

#include <stdexcept>
#include <string>

#include "sfcsim/errors.hpp"

namespace sfcsim {

namespace {
constexpr std::uint64_t kTopologyStream = 0x10;
constexpr std::uint64_t kBundleStream = 0x20;
constexpr double kEps = 1e-9;
}  // namespace

double reward_of(const std::vector<SimEvent>& events) {
  double r = 0.0;
  for (const auto& e : events) {
    switch (e.kind) {
      case SimEventKind::SfcAccepted: r += 2.0; break;
      case SimEventKind::SfcDropped: r -= 1.5; break;
      case SimEventKind::VnfUninstalledEssential: r -= 0.5; break;
      case SimEventKind::InvalidAction: r -= 1.0; break;
      default: break;
    }
  }
  return r;
}

void SimConfig::validate() const {
  if (tick_ms <= 0) throw ConfigError(Errc::Validation, "tick_ms must be > 0");
  if (dc_count < 2) throw ConfigError(Errc::Validation, "dc_count must be >= 2");
  if (max_ticks <= 0) throw ConfigError(Errc::Validation, "max_ticks must be > 0");
  if (dc_cpu_lo_ghz <= 0 || dc_cpu_hi_ghz < dc_cpu_lo_ghz) {
    throw ConfigError(Errc::Validation, "dc_cpu range invalid");
  }
  if (dc_storage_gb <= 0) throw ConfigError(Errc::Validation, "dc_storage_gb must be > 0");
  if (dc_ram_gb <= 0) throw ConfigError(Errc::Validation, "dc_ram_gb must be > 0");
  if (link_bw_mbps <= 0) throw ConfigError(Errc::Validation, "link_bw_mbps must be > 0");
  if (link_prop_delay_ms < 0) throw ConfigError(Errc::Validation, "link_prop_delay_ms < 0");
  if (request_count_multiplier < 1 || request_count_multiplier > 5) {
    throw ConfigError(Errc::Validation, "request_count_multiplier must be in [1,5]");
  }
}

namespace {
NetworkTopology make_topology(const SimConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, kTopologyStream));
  std::vector<Datacenter> dcs(static_cast<size_t>(cfg.dc_count));
  for (int i = 0; i < cfg.dc_count; ++i) {
    dcs[static_cast<size_t>(i)] = Datacenter{
        .id = i,
        .cpu_capacity_ghz = rng.uniform_real(cfg.dc_cpu_lo_ghz, cfg.dc_cpu_hi_ghz),
        .storage_capacity_gb = cfg.dc_storage_gb,
        .ram_capacity_gb = cfg.dc_ram_gb,
    };
  }
  return build_full_mesh(std::move(dcs), cfg.link_bw_mbps, cfg.link_prop_delay_ms);
}
}  // namespace

Environment::Environment(SimConfig config, Catalog catalog)
    : Environment(config, std::move(catalog), make_topology(config)) {}

Environment::Environment(SimConfig config, Catalog catalog, NetworkTopology topology)
    : config_(std::move(config)),
      catalog_(std::move(catalog)),
      topo_(std::move(topology)),
      bundle_rng_(derive_seed(config_.seed, kBundleStream)) {
  config_.validate();
  catalog_.validate();
  for (int i = 0; i < topo_.dc_count(); ++i) {
    if (topo_.dcs[static_cast<size_t>(i)].id != i) {
      throw ConfigError(Errc::Validation, "datacenter ids must be 0..n-1 in order");
    }
  }
  generate_bundles();
}

void Environment::generate_bundles() {
  // Draw order per request is (source, dest, bandwidth); bundle sizes are
  // drawn per (round, type). Fixed-bandwidth types consume no draw.
  const int n = topo_.dc_count();
  for (int round = 0; round < config_.request_count_multiplier; ++round) {
    for (int s = 0; s < kSfcCount; ++s) {
      const auto& spec = catalog_.sfcs[static_cast<size_t>(s)];
      const auto bundle = bundle_rng_.uniform_int(spec.bundle_lo, spec.bundle_hi);
      for (long k = 0; k < bundle; ++k) {
        SfcRequest req;
        req.id = static_cast<int>(requests_.size());
        req.type = spec.id;
        req.source_dc = static_cast<int>(bundle_rng_.uniform_int(0, n - 1));
        int dest = static_cast<int>(bundle_rng_.uniform_int(0, n - 2));
        if (dest >= req.source_dc) ++dest;
        req.dest_dc = dest;
        req.bandwidth_mbps = spec.ranged_bandwidth()
                                 ? bundle_rng_.uniform_real(spec.bw_lo_mbps, spec.bw_hi_mbps)
                                 : spec.bw_lo_mbps;
        requests_.push_back(std::move(req));
        ++metrics_.generated[s];
        ++live_;
      }
    }
  }
}

int Environment::add_request(SfcTypeId type, int source_dc, int dest_dc, double bw_mbps) {
  if (source_dc < 0 || source_dc >= topo_.dc_count() || dest_dc < 0 ||
      dest_dc >= topo_.dc_count()) {
    throw ConfigError(Errc::Validation, "request endpoints out of range");
  }
  if (bw_mbps <= 0) throw ConfigError(Errc::Validation, "request bandwidth must be > 0");
  SfcRequest req;
  req.id = static_cast<int>(requests_.size());
  req.type = type;
  req.source_dc = source_dc;
  req.dest_dc = dest_dc;
  req.bandwidth_mbps = bw_mbps;
  requests_.push_back(std::move(req));
  ++metrics_.generated[sfc_index(type)];
  ++live_;
  return requests_.back().id;
}

bool Environment::reachable(const SfcRequest& req, int dc_id) const {
  if (req.next_vnf_index == 0) {
    return dc_id == req.source_dc || topo_.find_link(req.source_dc, dc_id).has_value();
  }
  const int loc = req.location();
  if (loc == dc_id) return true;
  const auto link = topo_.find_link(loc, dc_id);
  if (!link) return false;
  return topo_.links[static_cast<size_t>(*link)].free_mbps() + kEps >= req.bandwidth_mbps;
}

bool Environment::allocatable(const SfcRequest& req, int dc_id) const {
  if (req.status != SfcStatus::Pending) return false;
  if (!reachable(req, dc_id)) return false;
  const VnfType v = req.next_vnf_type(catalog_);
  const auto& dc = topo_.dcs[static_cast<size_t>(dc_id)];
  return dc.idle_count(v) > 0 || dc.can_install(catalog_, v);
}

bool Environment::pending_demand(VnfType v) const {
  for (const auto& req : requests_) {
    if (req.status == SfcStatus::Pending && req.next_vnf_type(catalog_) == v) return true;
  }
  return false;
}

std::optional<int> Environment::select_candidate(int dc_id, VnfType v) const {
  std::optional<int> best;
  double best_slack = 0.0;
  for (const auto& req : requests_) {
    if (req.status != SfcStatus::Pending) continue;
    if (req.next_vnf_type(catalog_) != v) continue;
    if (!reachable(req, dc_id)) continue;
    const double slack = req.slack_ms(catalog_);
    if (!best || slack < best_slack - kEps) {
      best = req.id;
      best_slack = slack;
    }
  }
  return best;
}

ActionOutcome Environment::apply_action(int dc_id, Action action) {
  if (dc_id < 0 || dc_id >= topo_.dc_count()) {
    throw std::out_of_range("dc_id " + std::to_string(dc_id) + " out of range");
  }
  if (action.code < 0 || action.code >= Action::count()) {
    throw std::out_of_range("action code " + std::to_string(action.code) + " out of range");
  }

  ActionOutcome out;
  auto invalid = [&] {
    out.events.push_back({SimEventKind::InvalidAction, std::nullopt, dc_id, tick_});
  };

  if (action.is_idle()) {
    out.events.push_back({SimEventKind::Idle, std::nullopt, std::nullopt, tick_});
  } else if (action.is_place()) {
    const VnfType v = action.vnf();
    auto& dc = topo_.dcs[static_cast<size_t>(dc_id)];
    const auto cand = select_candidate(dc_id, v);
    if (!cand) {
      invalid();
    } else if (dc.idle_count(v) == 0 && !dc.can_install(catalog_, v)) {
      invalid();
    } else {
      if (dc.idle_count(v) == 0) dc.install_vnf(catalog_, v);
      auto& req = requests_[static_cast<size_t>(*cand)];
      const int prev_loc = req.location();
      ++dc.busy[vnf_index(v)];
      ActiveVnf active{req.next_vnf_index, dc_id, false, catalog_.vnf(v).proc_ms};
      if (prev_loc != dc_id) {
        const auto link = topo_.find_link(prev_loc, dc_id);
        active.in_transit = true;
        active.remaining_ms = topo_.links[static_cast<size_t>(*link)].prop_delay_ms;
        if (req.next_vnf_index > 0) {
          // Consecutive-VNF hop: bandwidth is held until the request ends.
          // The source-to-first-VNF hop costs transit time only.
          topo_.links[static_cast<size_t>(*link)].reserve(req.bandwidth_mbps);
          req.reservations.push_back({*link, req.bandwidth_mbps});
        }
      }
      req.active = active;
      req.status = active.in_transit ? SfcStatus::InTransit : SfcStatus::Processing;
      out.events.push_back({SimEventKind::VnfAllocated, req.id, dc_id, tick_});
    }
  } else {  // uninstall
    const VnfType v = action.vnf();
    auto& dc = topo_.dcs[static_cast<size_t>(dc_id)];
    if (dc.installed[vnf_index(v)] == 0 || dc.idle_count(v) == 0) {
      invalid();
    } else {
      dc.uninstall_vnf(v);
      if (pending_demand(v)) {
        out.events.push_back({SimEventKind::VnfUninstalledEssential, std::nullopt, dc_id, tick_});
      }
    }
  }

  out.reward = reward_of(out.events);
  return out;
}

void Environment::release_reservations(SfcRequest& req) {
  for (const auto& hop : req.reservations) {
    topo_.links[static_cast<size_t>(hop.link_idx)].release(hop.mbps);
  }
  req.reservations.clear();
}

void Environment::settle_accept(SfcRequest& req, std::vector<SimEvent>& events) {
  req.status = SfcStatus::Accepted;
  release_reservations(req);
  const int s = sfc_index(req.type);
  ++metrics_.accepted[s];
  metrics_.e2e_samples_ms[static_cast<size_t>(s)].push_back(req.elapsed_ms);
  metrics_.accepted_bw_mbps += req.bandwidth_mbps;
  --live_;
  events.push_back({SimEventKind::SfcAccepted, req.id, std::nullopt, tick_});
}

void Environment::settle_drop(SfcRequest& req, std::vector<SimEvent>& events) {
  if (req.active) {
    auto& dc = topo_.dcs[static_cast<size_t>(req.active->dc_id)];
    --dc.busy[vnf_index(catalog_.sfc(req.type).chain[static_cast<size_t>(req.active->vnf_idx)])];
    req.active.reset();
  }
  req.status = SfcStatus::Dropped;
  release_reservations(req);
  ++metrics_.dropped[sfc_index(req.type)];
  --live_;
  events.push_back({SimEventKind::SfcDropped, req.id, std::nullopt, tick_});
}

void Environment::complete_active_vnf(SfcRequest& req, std::vector<SimEvent>& events) {
  auto& dc = topo_.dcs[static_cast<size_t>(req.active->dc_id)];
  --dc.busy[vnf_index(catalog_.sfc(req.type).chain[static_cast<size_t>(req.active->vnf_idx)])];
  req.allocations.push_back({req.active->vnf_idx, req.active->dc_id});
  req.active.reset();
  ++req.next_vnf_index;
  if (req.next_vnf_index == catalog_.sfc(req.type).chain_length()) {
    if (req.elapsed_ms <= catalog_.sfc(req.type).e2e_limit_ms + kEps) {
      settle_accept(req, events);
    }
    // else the deadline sweep below drops it this same tick
  } else {
    req.status = SfcStatus::Pending;
  }
}

std::vector<SimEvent> Environment::advance_tick() {
  const double dt = config_.tick_ms;
  ++tick_;
  std::vector<SimEvent> events;

  for (auto& req : requests_) {
    if (!req.terminal()) req.elapsed_ms += dt;
  }

  // Instances that were already processing when the tick started.
  for (auto& req : requests_) {
    if (req.status != SfcStatus::Processing) continue;
    req.active->remaining_ms -= dt;
    if (req.active->remaining_ms <= kEps) complete_active_vnf(req, events);
  }

  // Transit arrivals switch to processing; their first processing
  // millisecond is the next tick.
  for (auto& req : requests_) {
    if (req.status != SfcStatus::InTransit) continue;
    req.active->remaining_ms -= dt;
    if (req.active->remaining_ms <= kEps) {
      const double leftover = -req.active->remaining_ms;
      req.active->in_transit = false;
      req.active->remaining_ms =
          catalog_.vnf(catalog_.sfc(req.type).chain[static_cast<size_t>(req.active->vnf_idx)]).proc_ms -
          leftover;
      req.status = SfcStatus::Processing;
      if (req.active->remaining_ms <= kEps) complete_active_vnf(req, events);
    }
  }

  for (auto& req : requests_) {
    if (req.terminal()) continue;
    if (req.elapsed_ms > catalog_.sfc(req.type).e2e_limit_ms + kEps) settle_drop(req, events);
  }

  metrics_.final_tick = tick_;
  return events;
}

std::vector<SimEvent> Environment::step(int dc_id, Action action) {
  auto out = apply_action(dc_id, action);
  auto more = advance_tick();
  out.events.insert(out.events.end(), more.begin(), more.end());
  return std::move(out.events);
}

RunMetrics run_episode(Environment& env, StepPolicy& policy, const StepHook& hook) {
  while (env.live_count() > 0 && env.tick() < env.config().max_ticks) {
    if (hook) {
      const Environment before = env;
      const auto [dc, action] = policy.step(env);
      const auto events = env.step(dc, action);
      hook(before, dc, env, events);
    } else {
      const auto [dc, action] = policy.step(env);
      env.step(dc, action);
    }
  }
  env.metrics().tick_budget_exhausted = env.live_count() > 0;
  env.metrics().final_tick = env.tick();
  return env.metrics();
}

}  // namespace sfcsim
