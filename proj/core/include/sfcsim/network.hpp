#pragma once

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "sfcsim/catalog.hpp"

namespace sfcsim {

/// A DC hosting VNF instances. Capacity is accounted implicitly: the sums of
/// installed-instance demands may never exceed the capacities (inclusive).
struct Datacenter {
  int id = 0;
  double cpu_capacity_ghz = 0.0;
  double storage_capacity_gb = 0.0;
  double ram_capacity_gb = 0.0;
  std::array<int, kVnfCount> installed{};  // instance count per VNF type
  std::array<int, kVnfCount> busy{};       // instances claimed by a request

  double used_cpu(const Catalog& cat) const;
  double used_storage(const Catalog& cat) const;
  double used_ram(const Catalog& cat) const;

  double free_cpu_fraction(const Catalog& cat) const;
  double free_storage_fraction(const Catalog& cat) const;
  double free_ram_fraction(const Catalog& cat) const;

  int idle_count(VnfType v) const { return installed[vnf_index(v)] - busy[vnf_index(v)]; }

  /// True iff one more instance of v keeps the storage sum within capacity.
  bool check_storage(const Catalog& cat, VnfType v) const;
  /// True iff one more instance of v keeps the compute sum within capacity.
  bool check_compute(const Catalog& cat, VnfType v) const;
  /// RAM is bookkept the same way as storage.
  bool check_ram(const Catalog& cat, VnfType v) const;
  bool can_install(const Catalog& cat, VnfType v) const;

  /// Adds one instance. Throws SimError with the violated constraint
  /// (CapacityC1, CapacityC2 or CapacityRam) and leaves the DC unchanged.
  void install_vnf(const Catalog& cat, VnfType v);

  /// Removes one idle instance. Throws NotInstalled or NoIdleInstance.
  void uninstall_vnf(VnfType v);

  bool operator==(const Datacenter&) const = default;
};

/// Undirected logical link between two DCs with a bandwidth budget.
struct LogicalLink {
  int a = 0;  // endpoint ids, a < b
  int b = 0;
  double bw_capacity_mbps = 0.0;
  double bw_reserved_mbps = 0.0;
  double prop_delay_ms = 0.0;

  double free_mbps() const { return bw_capacity_mbps - bw_reserved_mbps; }
  double free_fraction() const {
    return bw_capacity_mbps > 0 ? free_mbps() / bw_capacity_mbps : 0.0;
  }

  /// Reserves mbps if the result stays within capacity (inclusive), else
  /// throws BandwidthExceeded and leaves the link unchanged.
  void reserve(double mbps);
  /// Returns mbps to the pool; throws ReleaseUnderflow past zero.
  void release(double mbps);

  bool operator==(const LogicalLink&) const = default;
};

struct NetworkTopology {
  std::vector<Datacenter> dcs;
  std::vector<LogicalLink> links;
  std::map<std::pair<int, int>, int> adjacency;  // normalized (min,max) pair -> link index

  int dc_count() const { return static_cast<int>(dcs.size()); }

  /// Index of the direct link between i and j, if one exists.
  std::optional<int> find_link(int i, int j) const;
  std::vector<int> incident_links(int dc_id) const;

  /// Rebuilds the adjacency map from `links`; throws ConfigError on dangling
  /// endpoints or duplicate pairs.
  void index_links();

  bool operator==(const NetworkTopology& o) const {
    return dcs == o.dcs && links == o.links;
  }
};

/// Fully meshed topology with uniform link bandwidth and propagation delay.
NetworkTopology build_full_mesh(std::vector<Datacenter> dcs, double link_bw_mbps,
                                double prop_delay_ms);

}  // namespace sfcsim
