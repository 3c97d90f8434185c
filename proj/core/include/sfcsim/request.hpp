#pragma once

#include <optional>
#include <vector>

#include "sfcsim/catalog.hpp"

namespace sfcsim {

enum class SfcStatus : int { Pending, InTransit, Processing, Accepted, Dropped };

/// One VNF of the chain bound to a DC. `allocations` only holds completed
/// VNFs; the VNF currently in transit or processing lives in `active`.
struct VnfAllocation {
  int vnf_idx = 0;
  int dc_id = 0;

  bool operator==(const VnfAllocation&) const = default;
};

/// Bandwidth held on a link for the lifetime of the request.
struct HopReservation {
  int link_idx = 0;
  double mbps = 0.0;

  bool operator==(const HopReservation&) const = default;
};

struct ActiveVnf {
  int vnf_idx = 0;
  int dc_id = 0;
  bool in_transit = false;   // still travelling to dc_id
  double remaining_ms = 0.0; // transit time left, then processing time left

  bool operator==(const ActiveVnf&) const = default;
};

struct SfcRequest {
  int id = 0;
  SfcTypeId type = SfcTypeId::Cg;
  int source_dc = 0;
  int dest_dc = 0;
  double bandwidth_mbps = 0.0;  // fixed per request; drawn once for ranged types
  int next_vnf_index = 0;       // count of completed VNFs
  std::vector<VnfAllocation> allocations;
  std::optional<ActiveVnf> active;
  std::vector<HopReservation> reservations;
  double elapsed_ms = 0.0;
  SfcStatus status = SfcStatus::Pending;

  bool terminal() const { return status == SfcStatus::Accepted || status == SfcStatus::Dropped; }

  /// DC the request currently sits on: the active VNF's DC, else the last
  /// completed VNF's DC, else the source.
  int location() const {
    if (active) return active->dc_id;
    if (!allocations.empty()) return allocations.back().dc_id;
    return source_dc;
  }

  VnfType next_vnf_type(const Catalog& cat) const {
    return cat.sfc(type).chain[static_cast<size_t>(next_vnf_index)];
  }

  double slack_ms(const Catalog& cat) const { return cat.sfc(type).e2e_limit_ms - elapsed_ms; }

  /// True iff elapsed is within the type's deadline (inclusive).
  bool check_deadline(const Catalog& cat) const { return elapsed_ms <= cat.sfc(type).e2e_limit_ms; }

  bool operator==(const SfcRequest&) const = default;
};

}  // namespace sfcsim
