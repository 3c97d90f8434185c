#include "sfcsim/catalog.hpp"

#include "sfcsim/errors.hpp"

namespace sfcsim {

namespace {
constexpr const char* kVnfNames[kVnfCount] = {"NAT", "FW", "VOC", "TM", "WO", "IDPS"};
constexpr const char* kSfcNames[kSfcCount] = {"CG", "AR", "VoIP", "VS", "MIoT", "Ind4.0"};
}  // namespace

const char* vnf_name(VnfType v) { return kVnfNames[vnf_index(v)]; }
const char* sfc_name(SfcTypeId s) { return kSfcNames[sfc_index(s)]; }

VnfType vnf_from_name(const std::string& name) {
  for (int i = 0; i < kVnfCount; ++i) {
    if (name == kVnfNames[i]) return static_cast<VnfType>(i);
  }
  throw ConfigError(Errc::Validation, "unknown VNF type '" + name + "'");
}

SfcTypeId sfc_from_name(const std::string& name) {
  for (int i = 0; i < kSfcCount; ++i) {
    if (name == kSfcNames[i]) return static_cast<SfcTypeId>(i);
  }
  throw ConfigError(Errc::Validation, "unknown SFC type '" + name + "'");
}

void Catalog::validate() const {
  for (int i = 0; i < kVnfCount; ++i) {
    const auto& e = vnfs[i];
    if (e.type != static_cast<VnfType>(i)) {
      throw ConfigError(Errc::Validation, "VNF catalog entries out of order");
    }
    if (e.cpu_ghz <= 0 || e.storage_gb <= 0 || e.ram_gb <= 0) {
      throw ConfigError(Errc::Validation,
                        std::string("VNF ") + vnf_name(e.type) + " demands must be > 0");
    }
    if (e.proc_ms <= 0) {
      throw ConfigError(Errc::Validation,
                        std::string("VNF ") + vnf_name(e.type) + " proc_ms must be > 0");
    }
  }
  for (int i = 0; i < kSfcCount; ++i) {
    const auto& s = sfcs[i];
    if (s.id != static_cast<SfcTypeId>(i)) {
      throw ConfigError(Errc::Validation, "SFC catalog entries out of order");
    }
    if (s.chain.empty()) {
      throw ConfigError(Errc::Validation, std::string(sfc_name(s.id)) + " chain is empty");
    }
    if (s.e2e_limit_ms <= 0) {
      throw ConfigError(Errc::Validation, std::string(sfc_name(s.id)) + " e2e_limit must be > 0");
    }
    if (s.bw_lo_mbps <= 0 || s.bw_hi_mbps < s.bw_lo_mbps) {
      throw ConfigError(Errc::Validation, std::string(sfc_name(s.id)) + " bandwidth range invalid");
    }
    if (s.bundle_lo < 0 || s.bundle_hi < s.bundle_lo) {
      throw ConfigError(Errc::Validation, std::string(sfc_name(s.id)) + " bundle range invalid");
    }
  }
}

Catalog default_catalog() {
  using V = VnfType;
  Catalog c;
  // Demands are sized so a mid-range 64 GHz DC hosts roughly 8-12 mixed
  // instances with compute as the binding resource.
  c.vnfs = {{
      {V::Nat, 2.0, 20.0, 2.0, 1.0},
      {V::Fw, 4.0, 40.0, 4.0, 1.0},
      {V::Voc, 12.0, 120.0, 16.0, 2.0},
      {V::Tm, 6.0, 60.0, 8.0, 1.0},
      {V::Wo, 8.0, 80.0, 8.0, 2.0},
      {V::Idps, 10.0, 100.0, 16.0, 1.0},
  }};
  c.sfcs = {{
      {SfcTypeId::Cg, {V::Nat, V::Fw, V::Voc, V::Wo, V::Idps}, 4.0, 4.0, 80.0, 40, 55},
      {SfcTypeId::Ar, {V::Nat, V::Fw, V::Tm, V::Voc, V::Idps}, 100.0, 100.0, 10.0, 1, 4},
      {SfcTypeId::Voip, {V::Nat, V::Fw, V::Tm, V::Fw, V::Nat}, 0.064, 0.064, 100.0, 100, 200},
      {SfcTypeId::Vs, {V::Nat, V::Fw, V::Tm, V::Voc, V::Idps}, 4.0, 4.0, 100.0, 50, 100},
      {SfcTypeId::Miot, {V::Nat, V::Fw, V::Idps}, 1.0, 50.0, 5.0, 10, 15},
      {SfcTypeId::Ind40, {V::Nat, V::Fw}, 70.0, 70.0, 8.0, 1, 4},
  }};
  return c;
}

}  // namespace sfcsim
