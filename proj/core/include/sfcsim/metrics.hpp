#pragma once

#include <array>
#include <vector>

#include "sfcsim/catalog.hpp"

namespace sfcsim {

/// Per-episode counters. Per type and per tick the conservation
/// accepted + dropped + live = generated holds.
struct RunMetrics {
  std::array<int, kSfcCount> generated{};
  std::array<int, kSfcCount> accepted{};
  std::array<int, kSfcCount> dropped{};
  std::array<std::vector<double>, kSfcCount> e2e_samples_ms;  // accepted requests only
  double accepted_bw_mbps = 0.0;
  bool tick_budget_exhausted = false;
  long final_tick = 0;

  int total_generated() const;
  int total_accepted() const;
  int total_dropped() const;

  bool operator==(const RunMetrics&) const = default;
};

/// Accepted over generated across all types, in [0,1].
/// Throws NoRequests when nothing was generated.
double acceptance_ratio(const RunMetrics& m);

/// Per-type ratio; 0 when the type generated nothing.
double acceptance_ratio(const RunMetrics& m, SfcTypeId s);

/// Sum of accepted requests' bandwidth draws, in Gbps.
double throughput_gbps(const RunMetrics& m);

}  // namespace sfcsim
