#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace sfcsim {

/// The six VNF types a service chain can be composed of.
enum class VnfType : int { Nat = 0, Fw, Voc, Tm, Wo, Idps };
inline constexpr int kVnfCount = 6;

/// The six supported service chain types.
enum class SfcTypeId : int { Cg = 0, Ar, Voip, Vs, Miot, Ind40 };
inline constexpr int kSfcCount = 6;

inline constexpr int vnf_index(VnfType v) { return static_cast<int>(v); }
inline constexpr int sfc_index(SfcTypeId s) { return static_cast<int>(s); }

const char* vnf_name(VnfType v);
const char* sfc_name(SfcTypeId s);
VnfType vnf_from_name(const std::string& name);    // throws ConfigError
SfcTypeId sfc_from_name(const std::string& name);  // throws ConfigError

/// Per-VNF resource demand and processing time.
struct VnfCatalogEntry {
  VnfType type = VnfType::Nat;
  double cpu_ghz = 0.0;
  double storage_gb = 0.0;
  double ram_gb = 0.0;
  double proc_ms = 0.0;

  bool operator==(const VnfCatalogEntry&) const = default;
};

/// Per-SFC-type characteristics: ordered chain, bandwidth, deadline and
/// request bundle size range. Bandwidth is a range; fixed values have
/// bw_lo == bw_hi and are not drawn from the RNG.
struct SfcTypeSpec {
  SfcTypeId id = SfcTypeId::Cg;
  std::vector<VnfType> chain;
  double bw_lo_mbps = 0.0;
  double bw_hi_mbps = 0.0;
  double e2e_limit_ms = 0.0;
  int bundle_lo = 0;
  int bundle_hi = 0;

  int chain_length() const { return static_cast<int>(chain.size()); }
  bool ranged_bandwidth() const { return bw_lo_mbps < bw_hi_mbps; }

  bool operator==(const SfcTypeSpec&) const = default;
};

struct Catalog {
  std::array<VnfCatalogEntry, kVnfCount> vnfs;
  std::array<SfcTypeSpec, kSfcCount> sfcs;

  const VnfCatalogEntry& vnf(VnfType v) const { return vnfs[vnf_index(v)]; }
  const SfcTypeSpec& sfc(SfcTypeId s) const { return sfcs[sfc_index(s)]; }

  /// Throws ConfigError if any entry violates its invariants.
  void validate() const;

  bool operator==(const Catalog&) const = default;
};

/// Chains, bandwidths, deadlines and bundle ranges of the six standard 5G
/// core service chains. The per-VNF resource demands are tunable defaults
/// (see README); everything else is fixed.
Catalog default_catalog();

}  // namespace sfcsim
