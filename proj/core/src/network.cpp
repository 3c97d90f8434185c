#include "sfcsim/network.hpp"

#include <algorithm>
#include <string>

#include "sfcsim/errors.hpp"

namespace sfcsim {

double Datacenter::used_cpu(const Catalog& cat) const {
  double sum = 0.0;
  for (int i = 0; i < kVnfCount; ++i) sum += installed[i] * cat.vnfs[i].cpu_ghz;
  return sum;
}

double Datacenter::used_storage(const Catalog& cat) const {
  double sum = 0.0;
  for (int i = 0; i < kVnfCount; ++i) sum += installed[i] * cat.vnfs[i].storage_gb;
  return sum;
}

double Datacenter::used_ram(const Catalog& cat) const {
  double sum = 0.0;
  for (int i = 0; i < kVnfCount; ++i) sum += installed[i] * cat.vnfs[i].ram_gb;
  return sum;
}

double Datacenter::free_cpu_fraction(const Catalog& cat) const {
  return cpu_capacity_ghz > 0 ? (cpu_capacity_ghz - used_cpu(cat)) / cpu_capacity_ghz : 0.0;
}

double Datacenter::free_storage_fraction(const Catalog& cat) const {
  return storage_capacity_gb > 0 ? (storage_capacity_gb - used_storage(cat)) / storage_capacity_gb
                                 : 0.0;
}

double Datacenter::free_ram_fraction(const Catalog& cat) const {
  return ram_capacity_gb > 0 ? (ram_capacity_gb - used_ram(cat)) / ram_capacity_gb : 0.0;
}

bool Datacenter::check_storage(const Catalog& cat, VnfType v) const {
  return used_storage(cat) + cat.vnf(v).storage_gb <= storage_capacity_gb;
}

bool Datacenter::check_compute(const Catalog& cat, VnfType v) const {
  return used_cpu(cat) + cat.vnf(v).cpu_ghz <= cpu_capacity_ghz;
}

bool Datacenter::check_ram(const Catalog& cat, VnfType v) const {
  return used_ram(cat) + cat.vnf(v).ram_gb <= ram_capacity_gb;
}

bool Datacenter::can_install(const Catalog& cat, VnfType v) const {
  return check_storage(cat, v) && check_compute(cat, v) && check_ram(cat, v);
}

void Datacenter::install_vnf(const Catalog& cat, VnfType v) {
  if (!check_storage(cat, v)) {
    throw SimError(Errc::CapacityC1, std::string(vnf_name(v)) + " does not fit DC " +
                                         std::to_string(id) + " storage");
  }
  if (!check_compute(cat, v)) {
    throw SimError(Errc::CapacityC2, std::string(vnf_name(v)) + " does not fit DC " +
                                         std::to_string(id) + " compute");
  }
  if (!check_ram(cat, v)) {
    throw SimError(Errc::CapacityRam,
                   std::string(vnf_name(v)) + " does not fit DC " + std::to_string(id) + " RAM");
  }
  ++installed[vnf_index(v)];
}

void Datacenter::uninstall_vnf(VnfType v) {
  const int idx = vnf_index(v);
  if (installed[idx] == 0) {
    throw SimError(Errc::NotInstalled,
                   std::string(vnf_name(v)) + " not installed on DC " + std::to_string(id));
  }
  if (installed[idx] == busy[idx]) {
    throw SimError(Errc::NoIdleInstance,
                   std::string("every ") + vnf_name(v) + " on DC " + std::to_string(id) + " is busy");
  }
  --installed[idx];
}

void LogicalLink::reserve(double mbps) {
  if (bw_reserved_mbps + mbps > bw_capacity_mbps) {
    throw SimError(Errc::BandwidthExceeded, std::to_string(mbps) + " Mbps does not fit link (" +
                                                std::to_string(a) + "," + std::to_string(b) + ")");
  }
  bw_reserved_mbps += mbps;
}

void LogicalLink::release(double mbps) {
  if (mbps > bw_reserved_mbps) {
    throw SimError(Errc::ReleaseUnderflow, "releasing " + std::to_string(mbps) +
                                               " Mbps with only " +
                                               std::to_string(bw_reserved_mbps) + " reserved");
  }
  bw_reserved_mbps -= mbps;
}

std::optional<int> NetworkTopology::find_link(int i, int j) const {
  auto it = adjacency.find({std::min(i, j), std::max(i, j)});
  if (it == adjacency.end()) return std::nullopt;
  return it->second;
}

std::vector<int> NetworkTopology::incident_links(int dc_id) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(links.size()); ++i) {
    if (links[i].a == dc_id || links[i].b == dc_id) out.push_back(i);
  }
  return out;
}

void NetworkTopology::index_links() {
  adjacency.clear();
  for (int i = 0; i < static_cast<int>(links.size()); ++i) {
    auto& l = links[i];
    if (l.a > l.b) std::swap(l.a, l.b);
    if (l.a == l.b) throw ConfigError(Errc::Validation, "link endpoints must be distinct");
    if (l.a < 0 || l.b >= dc_count()) {
      throw ConfigError(Errc::Validation, "link endpoint out of range");
    }
    if (!adjacency.emplace(std::pair{l.a, l.b}, i).second) {
      throw ConfigError(Errc::Validation, "duplicate link between DCs " + std::to_string(l.a) +
                                              " and " + std::to_string(l.b));
    }
  }
}

NetworkTopology build_full_mesh(std::vector<Datacenter> dcs, double link_bw_mbps,
                                double prop_delay_ms) {
  NetworkTopology topo;
  topo.dcs = std::move(dcs);
  for (int i = 0; i < topo.dc_count(); ++i) {
    for (int j = i + 1; j < topo.dc_count(); ++j) {
      topo.links.push_back({i, j, link_bw_mbps, 0.0, prop_delay_ms});
    }
  }
  topo.index_links();
  return topo;
}

}  // namespace sfcsim
