#pragma once

#include <cstdint>

namespace sfcsim {

/// Environment parameters. Defaults model the reference setup: DCs with 2 TB
/// of storage, 256 GB of RAM and CPUs drawn from [12, 120] GHz, joined by
/// 1 Gbps links.
struct SimConfig {
  double tick_ms = 1.0;
  int dc_count = 4;
  double dc_cpu_lo_ghz = 12.0;
  double dc_cpu_hi_ghz = 120.0;
  double dc_storage_gb = 2000.0;
  double dc_ram_gb = 256.0;
  double link_bw_mbps = 1000.0;
  double link_prop_delay_ms = 1.0;
  int request_count_multiplier = 1;
  long max_ticks = 10000;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError

  bool operator==(const SimConfig&) const = default;
};

}  // namespace sfcsim
