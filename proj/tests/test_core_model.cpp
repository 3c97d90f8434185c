#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sfcsim/catalog.hpp"
#include "sfcsim/errors.hpp"
#include "sfcsim/metrics.hpp"
#include "sfcsim/network.hpp"
#include "sfcsim/request.hpp"
#include "sfcsim/rng.hpp"
#include "test_util.hpp"

using namespace sfcsim;
using testutil::make_dc;

namespace {

Errc thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SimError& e) {
    return e.code();
  }
  FAIL("expected a SimError");
  return Errc::Validation;
}

}  // namespace

TEST_CASE("default catalog matches the service chain table") {
  const Catalog cat = default_catalog();
  cat.validate();

  const auto& cg = cat.sfc(SfcTypeId::Cg);
  CHECK(cg.chain == std::vector<VnfType>{VnfType::Nat, VnfType::Fw, VnfType::Voc, VnfType::Wo,
                                         VnfType::Idps});
  CHECK(cg.bw_lo_mbps == 4.0);
  CHECK(cg.bw_hi_mbps == 4.0);
  CHECK(cg.e2e_limit_ms == 80.0);
  CHECK(cg.bundle_lo == 40);
  CHECK(cg.bundle_hi == 55);

  const auto& ar = cat.sfc(SfcTypeId::Ar);
  CHECK(ar.chain == std::vector<VnfType>{VnfType::Nat, VnfType::Fw, VnfType::Tm, VnfType::Voc,
                                         VnfType::Idps});
  CHECK(ar.bw_lo_mbps == 100.0);
  CHECK(ar.e2e_limit_ms == 10.0);
  CHECK(ar.bundle_lo == 1);
  CHECK(ar.bundle_hi == 4);

  const auto& voip = cat.sfc(SfcTypeId::Voip);
  CHECK(voip.chain == std::vector<VnfType>{VnfType::Nat, VnfType::Fw, VnfType::Tm, VnfType::Fw,
                                           VnfType::Nat});
  CHECK(voip.bw_lo_mbps == 0.064);
  CHECK(voip.e2e_limit_ms == 100.0);
  CHECK(voip.bundle_lo == 100);
  CHECK(voip.bundle_hi == 200);

  const auto& vs = cat.sfc(SfcTypeId::Vs);
  CHECK(vs.chain == ar.chain);
  CHECK(vs.bw_lo_mbps == 4.0);
  CHECK(vs.e2e_limit_ms == 100.0);
  CHECK(vs.bundle_lo == 50);
  CHECK(vs.bundle_hi == 100);

  const auto& miot = cat.sfc(SfcTypeId::Miot);
  CHECK(miot.chain == std::vector<VnfType>{VnfType::Nat, VnfType::Fw, VnfType::Idps});
  CHECK(miot.bw_lo_mbps == 1.0);
  CHECK(miot.bw_hi_mbps == 50.0);
  CHECK(miot.ranged_bandwidth());
  CHECK(miot.e2e_limit_ms == 5.0);
  CHECK(miot.bundle_lo == 10);
  CHECK(miot.bundle_hi == 15);

  const auto& ind = cat.sfc(SfcTypeId::Ind40);
  CHECK(ind.chain == std::vector<VnfType>{VnfType::Nat, VnfType::Fw});
  CHECK(ind.bw_lo_mbps == 70.0);
  CHECK(ind.e2e_limit_ms == 8.0);
  CHECK(ind.bundle_lo == 1);
  CHECK(ind.bundle_hi == 4);

  // one entry per VNF type, demands positive
  for (int v = 0; v < kVnfCount; ++v) {
    const auto& e = cat.vnfs[static_cast<size_t>(v)];
    CHECK(e.type == static_cast<VnfType>(v));
    CHECK(e.cpu_ghz > 0);
    CHECK(e.storage_gb > 0);
    CHECK(e.ram_gb > 0);
    CHECK(e.proc_ms > 0);
  }
}

TEST_CASE("check_storage boundary behaviour") {
  const Catalog cat = default_catalog();
  Datacenter dc = make_dc(0, 1000.0, 2000.0, 1000.0);
  for (int v = 0; v < kVnfCount; ++v) CHECK(dc.check_storage(cat, static_cast<VnfType>(v)));

  // free storage exactly one NAT: inclusive
  Datacenter tight = make_dc(0, 1000.0, cat.vnf(VnfType::Nat).storage_gb, 1000.0);
  CHECK(tight.check_storage(cat, VnfType::Nat));

  Datacenter under = make_dc(0, 1000.0, cat.vnf(VnfType::Nat).storage_gb - 1.0, 1000.0);
  CHECK_FALSE(under.check_storage(cat, VnfType::Nat));
}

TEST_CASE("check_compute boundary behaviour") {
  const Catalog cat = default_catalog();
  Datacenter dc = make_dc(0, 12.0);
  for (int v = 0; v < kVnfCount; ++v) {
    CAPTURE(v);
    CHECK(cat.vnfs[static_cast<size_t>(v)].cpu_ghz <= 12.0);
    CHECK(dc.check_compute(cat, static_cast<VnfType>(v)));
  }

  // exact fit: VOC demands 12 GHz on a 12 GHz DC
  CHECK(cat.vnf(VnfType::Voc).cpu_ghz == 12.0);
  dc.install_vnf(cat, VnfType::Voc);
  for (int v = 0; v < kVnfCount; ++v) CHECK_FALSE(dc.check_compute(cat, static_cast<VnfType>(v)));
}

TEST_CASE("install_vnf counts instances and names the violated constraint") {
  const Catalog cat = default_catalog();
  Datacenter dc = make_dc(0, 1000.0, 2000.0, 1000.0);
  dc.install_vnf(cat, VnfType::Nat);
  dc.install_vnf(cat, VnfType::Nat);
  CHECK(dc.installed[vnf_index(VnfType::Nat)] == 2);

  SUBCASE("storage violation is C1") {
    Datacenter tight = make_dc(0, 1000.0, 30.0, 1000.0);
    tight.install_vnf(cat, VnfType::Nat);  // uses 20 of 30 GB
    CHECK(thrown_code([&] { tight.install_vnf(cat, VnfType::Nat); }) == Errc::CapacityC1);
    CHECK(tight.installed[vnf_index(VnfType::Nat)] == 1);
  }
  SUBCASE("compute violation is C2") {
    Datacenter tight = make_dc(0, 3.0, 2000.0, 1000.0);
    tight.install_vnf(cat, VnfType::Nat);  // uses 2 of 3 GHz
    CHECK(thrown_code([&] { tight.install_vnf(cat, VnfType::Nat); }) == Errc::CapacityC2);
  }
  SUBCASE("ram violation has its own tag") {
    Datacenter tight = make_dc(0, 1000.0, 2000.0, 3.0);
    tight.install_vnf(cat, VnfType::Nat);  // uses 2 of 3 GB ram
    CHECK(thrown_code([&] { tight.install_vnf(cat, VnfType::Nat); }) == Errc::CapacityRam);
  }
}

TEST_CASE("uninstall_vnf requires an idle instance") {
  const Catalog cat = default_catalog();
  Datacenter dc = make_dc(0, 1000.0);
  dc.install_vnf(cat, VnfType::Fw);
  CHECK(dc.installed[vnf_index(VnfType::Fw)] == 1);

  SUBCASE("idle instance removable") {
    dc.uninstall_vnf(VnfType::Fw);
    CHECK(dc.installed[vnf_index(VnfType::Fw)] == 0);
  }
  SUBCASE("busy instance is not removable") {
    dc.busy[vnf_index(VnfType::Fw)] = 1;
    CHECK(thrown_code([&] { dc.uninstall_vnf(VnfType::Fw); }) == Errc::NoIdleInstance);
    CHECK(dc.installed[vnf_index(VnfType::Fw)] == 1);
  }
  SUBCASE("not installed at all") {
    CHECK(thrown_code([&] { dc.uninstall_vnf(VnfType::Wo); }) == Errc::NotInstalled);
  }
}

TEST_CASE("bandwidth reservation is inclusive at capacity") {
  LogicalLink link{0, 1, 1000.0, 0.0, 1.0};
  link.reserve(100.0);
  CHECK(link.bw_reserved_mbps == 100.0);

  link.reserve(900.0);  // exactly the remaining capacity
  CHECK(link.bw_reserved_mbps == 1000.0);
  CHECK(link.free_mbps() == 0.0);

  CHECK(thrown_code([&] { link.reserve(0.001); }) == Errc::BandwidthExceeded);
  CHECK(link.bw_reserved_mbps == 1000.0);
}

TEST_CASE("bandwidth release underflow") {
  LogicalLink link{0, 1, 1000.0, 100.0, 1.0};
  SUBCASE("full release") {
    link.release(100.0);
    CHECK(link.bw_reserved_mbps == 0.0);
  }
  SUBCASE("release zero is identity") {
    link.release(0.0);
    CHECK(link.bw_reserved_mbps == 100.0);
  }
  SUBCASE("over-release") {
    CHECK(thrown_code([&] { link.release(101.0); }) == Errc::ReleaseUnderflow);
    CHECK(link.bw_reserved_mbps == 100.0);
  }
}

TEST_CASE("check_deadline is inclusive") {
  const Catalog cat = default_catalog();
  SfcRequest req;
  req.type = SfcTypeId::Cg;
  req.elapsed_ms = 80.0;
  CHECK(req.check_deadline(cat));

  req.type = SfcTypeId::Ar;
  req.elapsed_ms = 10.5;
  CHECK_FALSE(req.check_deadline(cat));

  req.elapsed_ms = 0.0;
  CHECK(req.check_deadline(cat));
}

TEST_CASE("acceptance_ratio arithmetic") {
  RunMetrics m;
  SUBCASE("all accepted") {
    m.generated[sfc_index(SfcTypeId::Cg)] = 10;
    m.accepted[sfc_index(SfcTypeId::Cg)] = 10;
    CHECK(acceptance_ratio(m) == 1.0);
  }
  SUBCASE("none accepted") {
    m.generated[sfc_index(SfcTypeId::Cg)] = 10;
    CHECK(acceptance_ratio(m) == 0.0);
  }
  SUBCASE("mixed types") {
    m.accepted[sfc_index(SfcTypeId::Cg)] = 40;
    m.accepted[sfc_index(SfcTypeId::Voip)] = 100;
    m.generated[sfc_index(SfcTypeId::Cg)] = 40;
    m.generated[sfc_index(SfcTypeId::Voip)] = 100;
    m.generated[sfc_index(SfcTypeId::Miot)] = 10;
    CHECK(acceptance_ratio(m) == doctest::Approx(140.0 / 150.0));
  }
  SUBCASE("undefined without requests") {
    CHECK(thrown_code([&] { (void)acceptance_ratio(m); }) == Errc::NoRequests);
  }
}

TEST_CASE("acceptance_ratio is monotone in accepted counts") {
  Rng rng(99);
  RunMetrics m;
  for (int s = 0; s < kSfcCount; ++s) m.generated[s] = 100;
  double prev = acceptance_ratio(m);
  for (int step = 0; step < 200; ++step) {
    const int s = static_cast<int>(rng.uniform_int(0, kSfcCount - 1));
    if (m.accepted[s] < m.generated[s]) ++m.accepted[s];
    const double cur = acceptance_ratio(m);
    CHECK(cur >= prev);
    CHECK(cur >= 0.0);
    CHECK(cur <= 1.0);
    prev = cur;
  }
}

TEST_CASE("throughput sums accepted bandwidth in Gbps") {
  RunMetrics m;
  SUBCASE("one Ind 4.0") {
    m.accepted_bw_mbps = 70.0;
    CHECK(throughput_gbps(m) == doctest::Approx(0.070));
  }
  SUBCASE("nothing accepted") { CHECK(throughput_gbps(m) == 0.0); }
  SUBCASE("ten CG") {
    m.accepted_bw_mbps = 40.0;
    CHECK(throughput_gbps(m) == doctest::Approx(0.040));
  }
}

TEST_CASE("full mesh topology indexes every pair") {
  auto topo = build_full_mesh({make_dc(0, 64), make_dc(1, 64), make_dc(2, 64)}, 1000.0, 1.0);
  CHECK(topo.links.size() == 3);
  CHECK(topo.find_link(0, 1).has_value());
  CHECK(topo.find_link(1, 0) == topo.find_link(0, 1));
  CHECK(topo.find_link(2, 1).has_value());
  CHECK_FALSE(topo.find_link(0, 0).has_value());
  CHECK(topo.incident_links(1).size() == 2);
}

// Mutator fuzz: random valid and invalid calls; invalid calls must throw and
// leave state unchanged, and the capacity sums must hold throughout.
TEST_CASE("mutator fuzz keeps capacity constraints") {
  const Catalog cat = default_catalog();
  Rng rng(4242);
  std::vector<Datacenter> dcs;
  for (int i = 0; i < 4; ++i) {
    dcs.push_back(make_dc(i, rng.uniform_real(12, 120), 300.0, 64.0));
  }
  std::vector<LogicalLink> links;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) links.push_back({i, j, 1000.0, 0.0, 1.0});
  }

  int invalid_calls = 0;
  for (int it = 0; it < 20000; ++it) {
    const int kind = static_cast<int>(rng.uniform_int(0, 3));
    if (kind <= 1) {
      auto& dc = dcs[static_cast<size_t>(rng.uniform_int(0, 3))];
      const auto v = static_cast<VnfType>(rng.uniform_int(0, kVnfCount - 1));
      const Datacenter before = dc;
      if (kind == 0) {
        const bool fits = dc.can_install(cat, v);
        try {
          dc.install_vnf(cat, v);
          CHECK(fits);
        } catch (const SimError&) {
          ++invalid_calls;
          CHECK_FALSE(fits);
          CHECK(dc == before);
        }
      } else {
        // occasionally mark instances busy to exercise the idle rule
        if (rng.real01() < 0.2 && dc.installed[vnf_index(v)] > dc.busy[vnf_index(v)]) {
          ++dc.busy[vnf_index(v)];
          continue;
        }
        const bool removable = dc.idle_count(v) > 0;
        try {
          dc.uninstall_vnf(v);
          CHECK(removable);
        } catch (const SimError&) {
          ++invalid_calls;
          CHECK_FALSE(removable);
          CHECK(dc == before);
        }
      }
      CHECK(dc.used_storage(cat) <= dc.storage_capacity_gb);
      CHECK(dc.used_cpu(cat) <= dc.cpu_capacity_ghz);
      CHECK(dc.used_ram(cat) <= dc.ram_capacity_gb);
    } else {
      auto& link = links[static_cast<size_t>(rng.uniform_int(0, static_cast<std::int64_t>(links.size()) - 1))];
      const LogicalLink before = link;
      const double amount = rng.uniform_real(0.1, 400.0);
      if (kind == 2) {
        const bool fits = link.bw_reserved_mbps + amount <= link.bw_capacity_mbps;
        try {
          link.reserve(amount);
          CHECK(fits);
        } catch (const SimError&) {
          ++invalid_calls;
          CHECK_FALSE(fits);
          CHECK(link == before);
        }
      } else {
        const bool ok = amount <= link.bw_reserved_mbps;
        try {
          link.release(amount);
          CHECK(ok);
        } catch (const SimError&) {
          ++invalid_calls;
          CHECK_FALSE(ok);
          CHECK(link == before);
        }
      }
      CHECK(link.bw_reserved_mbps >= 0.0);
      CHECK(link.bw_reserved_mbps <= link.bw_capacity_mbps);
    }
  }
  // the fuzz must actually exercise the error paths
  CHECK(invalid_calls > 100);
}
