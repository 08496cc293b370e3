#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "flowcover/core.hpp"

namespace flowcover {

// A live polling scheme tracked across flow arrivals and expiries. The scheme
// is patched in place per event — cheap but drifting from optimal — and
// rebuilt from scratch every recompute_interval polling rounds.
struct ChurnState {
  PollingScheme scheme;
  std::map<FlowId, Flow> active_flows;  // keyed by id, so iteration is ordered
  std::uint32_t polls_since_recompute = 0;
  std::uint32_t recompute_interval = 5;
};

// Fresh state: the given flows become active and the scheme is the decoded
// greedy cover for them. flows must have strictly increasing ids; interval
// must be at least 1.
ChurnState make_churn_state(const Topology& topo, const std::vector<Flow>& flows,
                            const CostModel& model, std::uint32_t recompute_interval);

// Arrival patch: an already-covered flow changes nothing; otherwise the flow
// gets a single poll at the last switch of its path. Throws on a duplicate
// flow id.
ChurnState on_flow_arrival(ChurnState state, Flow flow);

// Expiry patch: drops the flow's single poll if it has one; poll-all switches
// are left alone (their replies just shrink by one entry). Throws on an
// unknown flow id.
ChurnState on_flow_expiry(ChurnState state, FlowId flow_id);

// Counts one polling round; on the recompute_interval-th round since the last
// rebuild, re-runs construction + greedy + decoding over the active flows and
// resets the counter.
ChurnState maybe_recompute(ChurnState state, const Topology& topo, const CostModel& model);

// Wire bytes per polling round of the state's scheme over its active flows.
std::uint64_t active_scheme_cost(const ChurnState& state, const Topology& topo,
                                 const CostModel& model);

// One trace entry: a flow arriving or expiring at a given round. Expiries
// carry only flow.id.
struct ChurnEvent {
  enum class Kind : std::uint8_t { arrive = 0, expire = 1 };
  std::uint32_t round = 0;
  Kind kind = Kind::arrive;
  Flow flow;
};

ChurnState apply_event(ChurnState state, const ChurnEvent& event);

}  // namespace flowcover
