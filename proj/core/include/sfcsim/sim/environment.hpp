#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "sfcsim/catalog.hpp"
#include "sfcsim/metrics.hpp"
#include "sfcsim/network.hpp"
#include "sfcsim/request.hpp"
#include "sfcsim/rng.hpp"
#include "sfcsim/sim/config.hpp"
#include "sfcsim/sim/event.hpp"

namespace sfcsim {

struct ActionOutcome {
  std::vector<SimEvent> events;
  double reward = 0.0;
};

/// Discrete-time provisioning environment. One logical thread owns and
/// mutates an instance; copies are cheap enough to snapshot for comparisons
/// and dataset collection.
///
/// A tick is one agent decision (apply_action) followed by one advance_tick.
/// Time accounting: every non-terminal request ages by tick_ms per tick, so
/// waiting burns the deadline alongside processing and transit.
class Environment {
 public:
  /// Seeds the topology (DC compute draws) and the request bundles from
  /// config.seed and leaves the environment at tick 0.
  Environment(SimConfig config, Catalog catalog);

  /// Same, but on a caller-supplied topology (config dc/link fields ignored).
  Environment(SimConfig config, Catalog catalog, NetworkTopology topology);

  const SimConfig& config() const { return config_; }
  const Catalog& catalog() const { return catalog_; }
  const NetworkTopology& topology() const { return topo_; }
  const std::vector<SfcRequest>& requests() const { return requests_; }
  const RunMetrics& metrics() const { return metrics_; }
  RunMetrics& metrics() { return metrics_; }
  long tick() const { return tick_; }
  int live_count() const { return live_; }
  bool done() const { return live_ == 0; }

  /// Appends a single request (elapsed 0, pending) outside bundle
  /// generation; used to craft scenarios. Returns the request id.
  int add_request(SfcTypeId type, int source_dc, int dest_dc, double bw_mbps);

  /// Applies one action at one DC. Never throws for in-domain (dc, action):
  /// infeasible attempts emit InvalidAction and leave the state unchanged.
  ActionOutcome apply_action(int dc_id, Action action);

  /// Advances simulated time by tick_ms: ages requests, progresses busy
  /// instances and transits, settles completions and deadline drops.
  std::vector<SimEvent> advance_tick();

  /// apply_action followed by advance_tick, events concatenated.
  std::vector<SimEvent> step(int dc_id, Action action);

  /// Pending request whose next VNF is v and which can reach dc_id, with
  /// minimum remaining slack (ties to the lower id). Returns the request id.
  std::optional<int> select_candidate(int dc_id, VnfType v) const;

  /// True when req's next VNF may be bound at dc: for the first VNF any DC
  /// linked to the source (or the source itself), otherwise the direct link
  /// from the request's location must have free bandwidth >= the request's.
  bool reachable(const SfcRequest& req, int dc_id) const;

  /// reachable plus an idle instance of the needed type or room to install one.
  bool allocatable(const SfcRequest& req, int dc_id) const;

  /// True iff some pending request's next VNF has the given type.
  bool pending_demand(VnfType v) const;

  bool operator==(const Environment& o) const {
    return topo_ == o.topo_ && requests_ == o.requests_ && metrics_ == o.metrics_ &&
           tick_ == o.tick_ && live_ == o.live_;
  }

 private:
  void generate_bundles();
  void complete_active_vnf(SfcRequest& req, std::vector<SimEvent>& events);
  void settle_accept(SfcRequest& req, std::vector<SimEvent>& events);
  void settle_drop(SfcRequest& req, std::vector<SimEvent>& events);
  void release_reservations(SfcRequest& req);

  SimConfig config_;
  Catalog catalog_;
  NetworkTopology topo_;
  std::vector<SfcRequest> requests_;  // request id == index
  RunMetrics metrics_;
  long tick_ = 0;
  int live_ = 0;
  Rng bundle_rng_;
};

/// An agent: one (DC, action) decision per tick.
class StepPolicy {
 public:
  virtual ~StepPolicy() = default;
  virtual std::pair<int, Action> step(const Environment& env) = 0;
};

/// Composition of a DC selector and an action policy evaluated at the
/// selected DC.
class DcSelector {
 public:
  virtual ~DcSelector() = default;
  virtual int select(const Environment& env) = 0;
};

class ActionPolicy {
 public:
  virtual ~ActionPolicy() = default;
  virtual Action act(const Environment& env, int dc_id) = 0;
};

class CompositePolicy : public StepPolicy {
 public:
  CompositePolicy(DcSelector& selector, ActionPolicy& policy)
      : selector_(selector), policy_(policy) {}

  std::pair<int, Action> step(const Environment& env) override {
    const int dc = selector_.select(env);
    return {dc, policy_.act(env, dc)};
  }

 private:
  DcSelector& selector_;
  ActionPolicy& policy_;
};

/// Uniform-random DC each tick; the plain DRL configuration and the dataset
/// collection runtime both use this selector.
class RandomDcSelector : public DcSelector {
 public:
  explicit RandomDcSelector(std::uint64_t seed) : rng_(seed) {}
  int select(const Environment& env) override {
    return static_cast<int>(rng_.uniform_int(0, env.topology().dc_count() - 1));
  }

 private:
  Rng rng_;
};

/// Called after each tick with the pre-action snapshot, the acted-on DC, the
/// post-advance environment and the tick's events.
using StepHook =
    std::function<void(const Environment& before, int dc_id, const Environment& after,
                       const std::vector<SimEvent>& events)>;

/// Runs {select DC, act, apply, advance} until every request is terminal or
/// the tick budget runs out (flagged in the metrics, not an error).
RunMetrics run_episode(Environment& env, StepPolicy& policy, const StepHook& hook = {});

}  // namespace sfcsim
