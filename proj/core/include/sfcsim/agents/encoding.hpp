#pragma once

#include <vector>

#include "sfcsim/sim/environment.hpp"

namespace sfcsim {

/// Normalization caps for count features. Values are divided by the cap and
/// clamped to [0,1].
struct EncoderConfig {
  int request_count_cap = 200;  // the largest bundle upper bound
  int instance_count_cap = 24;

  bool operator==(const EncoderConfig&) const = default;
};

inline constexpr int kBranch1Dim = 17;
inline constexpr int kBranch2Dim = 3 * kSfcCount;  // 18
inline constexpr int kBranch3Dim = 4 * kSfcCount;  // 24
inline constexpr int kDcStateDim = kBranch1Dim + kBranch2Dim;  // 35

/// The three DQN input branches. Field order is normative; checkpoints are
/// only portable across builds that keep it.
struct StateTriple {
  std::vector<float> branch1;  // selected-DC resources and instances
  std::vector<float> branch2;  // per-type SFC picture at that DC
  std::vector<float> branch3;  // per-type network-wide SFC picture

  bool operator==(const StateTriple&) const = default;
};

/// Branch 1, 17 floats:
///   [0] free cpu fraction   [1] free storage fraction   [2] free ram fraction
///   [3..8]  installed count per VNF type / instance cap
///   [9..14] busy count per VNF type / instance cap
///   [15] mean incident-link free-bandwidth fraction (1 with no links)
///   [16] min incident-link free-bandwidth fraction (1 with no links)
std::vector<float> encode_branch1(const Environment& env, int dc_id, const EncoderConfig& cfg);

/// Branch 2, 3 floats per SFC type in catalog order:
///   [0] count of pending requests allocatable at this DC / request cap
///   [1] min normalized slack among them (1 when none)
///   [2] mean bandwidth demand among them / max link capacity
///       (the type's nominal midpoint when none)
std::vector<float> encode_branch2(const Environment& env, int dc_id, const EncoderConfig& cfg);

/// Branch 3, 4 floats per SFC type in catalog order:
///   [0] pending count / request cap
///   [1] accepted / generated (0 when none generated)
///   [2] min normalized slack among pending (1 when none)
///   [3] mean chain progress of live requests (0 when none live)
std::vector<float> encode_branch3(const Environment& env, const EncoderConfig& cfg);

StateTriple encode_state(const Environment& env, int dc_id, const EncoderConfig& cfg);

/// branch1 followed by branch2 of the same DC; 35 floats.
std::vector<float> encode_dc_state(const Environment& env, int dc_id, const EncoderConfig& cfg);

}  // namespace sfcsim
