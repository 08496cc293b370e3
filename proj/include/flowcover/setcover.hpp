#pragma once

#include <cstdint>
#include <vector>

#include "flowcover/core.hpp"

namespace flowcover {

// What picking a candidate set means on the wire: poll one switch in full, or
// poll one flow at one switch.
struct CandidateAction {
  enum class Kind : std::uint8_t { poll_all = 0, single_flow = 1 };
  Kind kind = Kind::poll_all;
  std::uint32_t id = 0;  // switch id for poll_all, flow id for single_flow
  friend auto operator<=>(const CandidateAction&, const CandidateAction&) = default;
};

struct CandidateSet {
  std::vector<FlowId> flow_ids;  // ascending
  CandidateAction action;
};

// The weighted set cover instance built from a monitored flow set: the
// universe is the flow ids, candidate sets are one poll-all set per switch
// that carries at least one flow (ordered by switch id) followed by one
// singleton per flow (ordered by flow id). weights[i] prices set i as one
// request plus the reply listing its flows.
struct WeightedSetSystem {
  std::vector<FlowId> universe;        // ascending
  std::vector<CandidateSet> sets;
  std::vector<std::uint64_t> weights;  // aligned with sets
  std::size_t poll_all_count = 0;      // sets[0..poll_all_count) are poll-all sets
};

// Requires flows sorted by strictly increasing id (throws otherwise); rejects
// flows whose path leaves the topology.
WeightedSetSystem construct_weighted_sets(const Topology& topo,
                                          const std::vector<Flow>& flows,
                                          const CostModel& model);

struct CoverSolution {
  std::vector<std::uint32_t> chosen;  // ascending indices into system.sets
  std::uint64_t total_weight = 0;
};

// Weighted greedy set cover with lazy re-evaluation: repeatedly picks the set
// minimizing weight / newly-covered-flows. Ratio comparisons are exact
// (integer cross-multiplication), and ties break on smaller set size, then
// poll-all before single-flow, then lower switch/flow id, so the selection is
// a deterministic function of the system alone. Throws if some universe flow
// is in no set.
CoverSolution greedy_cover(const WeightedSetSystem& system);

struct ExactCoverResult {
  CoverSolution solution;
  bool proven = false;  // true when the search space was exhausted within budget
  std::uint64_t nodes_visited = 0;
};

inline constexpr std::uint64_t kDefaultExactNodeBudget = 1ull << 22;

// Optimal cover by branch and bound over the poll-all sets (singletons enter
// only through completion: at every node the uncovered remainder closed with
// singletons is a feasible solution and updates the incumbent). Subtrees are
// pruned with an admissible per-flow bound — each uncovered flow costs at
// least the floor of the best weight-per-flow ratio among sets containing it
// (see docs/exact-cover-bound.md). If the node budget runs out the best
// incumbent is returned with proven = false. Deterministic for a given
// system and budget.
ExactCoverResult exact_cover(const WeightedSetSystem& system,
                             std::uint64_t node_budget = kDefaultExactNodeBudget);

// Turns chosen sets into a polling scheme: poll-all sets name their switch;
// a single-flow set polls the flow at the last switch of its path (the
// switch nearest the destination sees every packet that survived the whole
// path, which is what loss accounting wants). Single polls for flows already
// covered by a chosen poll-all switch are dropped as redundant. flows must be
// the vector the system was constructed from.
PollingScheme decode_scheme(const WeightedSetSystem& system, const CoverSolution& solution,
                            const std::vector<Flow>& flows);

}  // namespace flowcover
