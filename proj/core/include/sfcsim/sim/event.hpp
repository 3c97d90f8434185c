#pragma once

#include <optional>
#include <vector>

#include "sfcsim/catalog.hpp"

namespace sfcsim {

enum class SimEventKind : int {
  SfcAccepted,              // request completed its chain within the deadline
  SfcDropped,               // deadline exceeded
  VnfAllocated,             // one VNF bound to an instance
  VnfUninstalledEssential,  // an instance removed while some pending request needs the type
  InvalidAction,            // action rejected; the state did not change
  Idle
};

struct SimEvent {
  SimEventKind kind = SimEventKind::Idle;
  std::optional<int> request_id;
  std::optional<int> dc_id;
  long tick = 0;

  bool operator==(const SimEvent&) const = default;
};

/// Flat action code: [0, |V|) places VNF type v, [|V|, 2|V|) uninstalls it,
/// 2|V| is the idle wait. 13 codes for the 6-type catalog.
struct Action {
  int code = 2 * kVnfCount;

  static Action place(VnfType v) { return {vnf_index(v)}; }
  static Action uninstall(VnfType v) { return {kVnfCount + vnf_index(v)}; }
  static Action idle() { return {2 * kVnfCount}; }
  static constexpr int count() { return 2 * kVnfCount + 1; }

  bool is_place() const { return code >= 0 && code < kVnfCount; }
  bool is_uninstall() const { return code >= kVnfCount && code < 2 * kVnfCount; }
  bool is_idle() const { return code == 2 * kVnfCount; }
  VnfType vnf() const { return static_cast<VnfType>(is_place() ? code : code - kVnfCount); }

  bool operator==(const Action&) const = default;
};

/// Scalar reward: accepted +2, dropped -1.5, essential uninstall -0.5,
/// invalid action -1, everything else 0.
double reward_of(const std::vector<SimEvent>& events);

}  // namespace sfcsim
