#include "sfcsim/metrics.hpp"

#include <numeric>

#include "sfcsim/errors.hpp"

namespace sfcsim {

int RunMetrics::total_generated() const {
  return std::accumulate(generated.begin(), generated.end(), 0);
}

int RunMetrics::total_accepted() const {
  return std::accumulate(accepted.begin(), accepted.end(), 0);
}

int RunMetrics::total_dropped() const {
  return std::accumulate(dropped.begin(), dropped.end(), 0);
}

double acceptance_ratio(const RunMetrics& m) {
  const int gen = m.total_generated();
  if (gen == 0) throw SimError(Errc::NoRequests, "no requests generated");
  return static_cast<double>(m.total_accepted()) / gen;
}

double acceptance_ratio(const RunMetrics& m, SfcTypeId s) {
  const int gen = m.generated[sfc_index(s)];
  return gen == 0 ? 0.0 : static_cast<double>(m.accepted[sfc_index(s)]) / gen;
}

double throughput_gbps(const RunMetrics& m) { return m.accepted_bw_mbps / 1000.0; }

}  // namespace sfcsim
