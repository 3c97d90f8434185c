#pragma once

// Exhaustive placement-schedule oracle for single-request micro-instances.
// Independent of the engine: it enumerates every DC assignment of the chain
// and prices the allocate-as-soon-as-possible schedule analytically, with
// cumulative capacity and bandwidth checks. Used to label feasibility and to
// derive the action script that drives the real simulator.

#include <map>
#include <optional>
#include <vector>

#include "sfcsim/sim/environment.hpp"

namespace feasibility {

using namespace sfcsim;

struct OracleResult {
  bool feasible = false;
  std::vector<int> assignment;  // chain position -> DC, best when feasible
  double completion_ms = 0.0;
};

inline OracleResult best_assignment(const Environment& env, int request_id) {
  const auto& req = env.requests()[static_cast<size_t>(request_id)];
  const auto& cat = env.catalog();
  const auto& topo = env.topology();
  const auto& chain = cat.sfc(req.type).chain;
  const int n = static_cast<int>(chain.size());
  const int dcs = topo.dc_count();

  OracleResult best;
  std::vector<int> assign(static_cast<size_t>(n), 0);

  for (long code = 0; code < static_cast<long>(std::pow(dcs, n)); ++code) {
    long rest = code;
    for (int m = 0; m < n; ++m) {
      assign[static_cast<size_t>(m)] = static_cast<int>(rest % dcs);
      rest /= dcs;
    }

    std::array<std::array<int, kVnfCount>, 8> installed{};
    std::map<int, int> link_hops;  // link index -> concurrent held hops
    double elapsed = 0.0;
    int loc = req.source_dc;
    bool ok = true;

    for (int m = 0; m < n && ok; ++m) {
      const int d = assign[static_cast<size_t>(m)];
      const VnfType v = chain[static_cast<size_t>(m)];
      // movement: first hop needs a link but no bandwidth, later hops hold
      // bandwidth for the request's whole lifetime
      if (d != loc) {
        const auto link = topo.find_link(loc, d);
        if (!link) {
          ok = false;
          break;
        }
        const auto& l = topo.links[static_cast<size_t>(*link)];
        if (m > 0) {
          const int held = ++link_hops[*link];
          if (l.bw_reserved_mbps + held * req.bandwidth_mbps > l.bw_capacity_mbps + 1e-9) {
            ok = false;
            break;
          }
        }
        elapsed += l.prop_delay_ms;
      }
      // instance: reuse one installed earlier in the schedule, else install
      auto& inst = installed[static_cast<size_t>(d)];
      if (inst[vnf_index(v)] == 0) {
        const auto& dc = topo.dcs[static_cast<size_t>(d)];
        double cpu = dc.used_cpu(cat), sto = dc.used_storage(cat), ram = dc.used_ram(cat);
        for (int t = 0; t < kVnfCount; ++t) {
          cpu += inst[t] * cat.vnfs[static_cast<size_t>(t)].cpu_ghz;
          sto += inst[t] * cat.vnfs[static_cast<size_t>(t)].storage_gb;
          ram += inst[t] * cat.vnfs[static_cast<size_t>(t)].ram_gb;
        }
        const auto& e = cat.vnf(v);
        if (cpu + e.cpu_ghz > dc.cpu_capacity_ghz + 1e-9 ||
            sto + e.storage_gb > dc.storage_capacity_gb + 1e-9 ||
            ram + e.ram_gb > dc.ram_capacity_gb + 1e-9) {
          ok = false;
          break;
        }
        inst[vnf_index(v)] = 1;
      }
      elapsed += cat.vnf(v).proc_ms;
      loc = d;
    }

    if (!ok) continue;
    if (elapsed > cat.sfc(req.type).e2e_limit_ms + 1e-9) continue;
    if (!best.feasible || elapsed < best.completion_ms - 1e-9) {
      best.feasible = true;
      best.assignment = assign;
      best.completion_ms = elapsed;
    }
  }

  if (!best.feasible) {
    // keep some assignment around so the caller can drive the simulator and
    // confirm the request is not accepted
    best.assignment.assign(static_cast<size_t>(n), 0);
  }
  return best;
}

/// Scripted agent that follows the oracle's assignment for one request and
/// idles while it processes or transits.
class ScriptedPolicy : public StepPolicy {
 public:
  ScriptedPolicy(int request_id, std::vector<int> assignment)
      : request_id_(request_id), assignment_(std::move(assignment)) {}

  std::pair<int, Action> step(const Environment& env) override {
    const auto& req = env.requests()[static_cast<size_t>(request_id_)];
    if (req.status == SfcStatus::Pending &&
        req.next_vnf_index < static_cast<int>(assignment_.size())) {
      const int dc = assignment_[static_cast<size_t>(req.next_vnf_index)];
      return {dc, Action::place(req.next_vnf_type(env.catalog()))};
    }
    return {0, Action::idle()};
  }

 private:
  int request_id_;
  std::vector<int> assignment_;
};

}  // namespace feasibility
