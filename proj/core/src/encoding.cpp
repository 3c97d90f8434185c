#include "sfcsim/agents/encoding.hpp"

#include <algorithm>

namespace sfcsim {

namespace {

float clamp01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

float norm_count(int count, int cap) {
  return clamp01(static_cast<double>(count) / static_cast<double>(cap));
}

double slack_norm(const SfcRequest& req, const Catalog& cat) {
  const double limit = cat.sfc(req.type).e2e_limit_ms;
  return std::clamp(req.slack_ms(cat) / limit, 0.0, 1.0);
}

double max_link_capacity(const NetworkTopology& topo) {
  double m = 0.0;
  for (const auto& l : topo.links) m = std::max(m, l.bw_capacity_mbps);
  return m > 0 ? m : 1.0;
}

}  // namespace

std::vector<float> encode_branch1(const Environment& env, int dc_id, const EncoderConfig& cfg) {
  const auto& cat = env.catalog();
  const auto& dc = env.topology().dcs[static_cast<size_t>(dc_id)];
  std::vector<float> out;
  out.reserve(kBranch1Dim);
  out.push_back(clamp01(dc.free_cpu_fraction(cat)));
  out.push_back(clamp01(dc.free_storage_fraction(cat)));
  out.push_back(clamp01(dc.free_ram_fraction(cat)));
  for (int v = 0; v < kVnfCount; ++v) out.push_back(norm_count(dc.installed[v], cfg.instance_count_cap));
  for (int v = 0; v < kVnfCount; ++v) out.push_back(norm_count(dc.busy[v], cfg.instance_count_cap));
  const auto incident = env.topology().incident_links(dc_id);
  if (incident.empty()) {
    out.push_back(1.0f);
    out.push_back(1.0f);
  } else {
    double sum = 0.0, mn = 1.0;
    for (int li : incident) {
      const double f = env.topology().links[static_cast<size_t>(li)].free_fraction();
      sum += f;
      mn = std::min(mn, f);
    }
    out.push_back(clamp01(sum / static_cast<double>(incident.size())));
    out.push_back(clamp01(mn));
  }
  return out;
}

std::vector<float> encode_branch2(const Environment& env, int dc_id, const EncoderConfig& cfg) {
  const auto& cat = env.catalog();
  const double bw_ref = max_link_capacity(env.topology());
  std::vector<float> out;
  out.reserve(kBranch2Dim);
  for (int s = 0; s < kSfcCount; ++s) {
    int count = 0;
    double min_slack = 1.0;
    double bw_sum = 0.0;
    for (const auto& req : env.requests()) {
      if (sfc_index(req.type) != s) continue;
      if (!env.allocatable(req, dc_id)) continue;
      ++count;
      min_slack = std::min(min_slack, slack_norm(req, cat));
      bw_sum += req.bandwidth_mbps;
    }
    const auto& spec = cat.sfcs[static_cast<size_t>(s)];
    const double bw_mean =
        count > 0 ? bw_sum / count : 0.5 * (spec.bw_lo_mbps + spec.bw_hi_mbps);
    out.push_back(norm_count(count, cfg.request_count_cap));
    out.push_back(clamp01(min_slack));
    out.push_back(clamp01(bw_mean / bw_ref));
  }
  return out;
}

std::vector<float> encode_branch3(const Environment& env, const EncoderConfig& cfg) {
  const auto& cat = env.catalog();
  const auto& m = env.metrics();
  std::vector<float> out;
  out.reserve(kBranch3Dim);
  for (int s = 0; s < kSfcCount; ++s) {
    int pending = 0, live = 0;
    double min_slack = 1.0, progress_sum = 0.0;
    const int chain_len = cat.sfcs[static_cast<size_t>(s)].chain_length();
    for (const auto& req : env.requests()) {
      if (sfc_index(req.type) != s || req.terminal()) continue;
      ++live;
      progress_sum += static_cast<double>(req.next_vnf_index) / chain_len;
      if (req.status == SfcStatus::Pending) {
        ++pending;
        min_slack = std::min(min_slack, slack_norm(req, cat));
      }
    }
    out.push_back(norm_count(pending, cfg.request_count_cap));
    out.push_back(m.generated[s] > 0
                      ? clamp01(static_cast<double>(m.accepted[s]) / m.generated[s])
                      : 0.0f);
    out.push_back(pending > 0 ? clamp01(min_slack) : 1.0f);
    out.push_back(live > 0 ? clamp01(progress_sum / live) : 0.0f);
  }
  return out;
}

StateTriple encode_state(const Environment& env, int dc_id, const EncoderConfig& cfg) {
  return {encode_branch1(env, dc_id, cfg), encode_branch2(env, dc_id, cfg),
          encode_branch3(env, cfg)};
}

std::vector<float> encode_dc_state(const Environment& env, int dc_id, const EncoderConfig& cfg) {
  auto out = encode_branch1(env, dc_id, cfg);
  const auto b2 = encode_branch2(env, dc_id, cfg);
  out.insert(out.end(), b2.begin(), b2.end());
  return out;
}

}  // namespace sfcsim
