#include "sfcsim/agents/heuristic.hpp"

namespace sfcsim {

std::pair<int, Action> HeuristicPolicy::step(const Environment& env) {
  const auto& cat = env.catalog();
  const SfcRequest* target = nullptr;
  for (const auto& req : env.requests()) {
    if (req.status != SfcStatus::Pending) continue;
    if (!target || req.slack_ms(cat) < target->slack_ms(cat)) target = &req;
  }
  if (!target) return {0, Action::idle()};

  const VnfType v = target->next_vnf_type(cat);
  const auto& topo = env.topology();
  const int loc = target->location();

  // Prefer a DC with an idle instance, nearest to the request's location.
  int best_dc = -1;
  double best_delay = 0.0;
  for (int d = 0; d < topo.dc_count(); ++d) {
    if (!env.reachable(*target, d)) continue;
    if (topo.dcs[static_cast<size_t>(d)].idle_count(v) <= 0) continue;
    double delay = 0.0;
    if (d != loc) {
      const auto link = topo.find_link(loc, d);
      delay = topo.links[static_cast<size_t>(*link)].prop_delay_ms;
    }
    if (best_dc < 0 || delay < best_delay) {
      best_dc = d;
      best_delay = delay;
    }
  }
  if (best_dc >= 0) return {best_dc, Action::place(v)};

  // No idle instance anywhere reachable: install where compute is freest.
  double best_free = -1.0;
  for (int d = 0; d < topo.dc_count(); ++d) {
    if (!env.reachable(*target, d)) continue;
    if (!topo.dcs[static_cast<size_t>(d)].can_install(cat, v)) continue;
    const double free = topo.dcs[static_cast<size_t>(d)].free_cpu_fraction(cat);
    if (free > best_free) {
      best_free = free;
      best_dc = d;
    }
  }
  if (best_dc >= 0) return {best_dc, Action::place(v)};

  return {0, Action::idle()};
}

}  // namespace sfcsim
