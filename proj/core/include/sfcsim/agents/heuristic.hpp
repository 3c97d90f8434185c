#pragma once

#include "sfcsim/sim/environment.hpp"

namespace sfcsim {

/// Rule-based benchmark. Each tick it commits to the pending request with
/// minimum slack (ties to the lower id) and serves its next VNF:
///   1. allocate on the reachable DC that already has an idle instance,
///      nearest by propagation delay (ties to the lower DC id);
///   2. otherwise install on the reachable DC with the largest free compute
///      fraction;
///   3. otherwise idle.
/// Pure function of the environment snapshot, no internal state.
class HeuristicPolicy : public StepPolicy {
 public:
  std::pair<int, Action> step(const Environment& env) override;
};

}  // namespace sfcsim
