#include "flowcover/setcover.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>

namespace flowcover {

WeightedSetSystem construct_weighted_sets(const Topology& topo,
                                          const std::vector<Flow>& flows,
                                          const CostModel& model) {
  WeightedSetSystem system;
  system.universe.reserve(flows.size());
  for (std::size_t i = 0; i < flows.size(); ++i) {
    if (i > 0 && flows[i - 1].id >= flows[i].id)
      throw std::invalid_argument("construct_weighted_sets: flow ids must be strictly increasing");
    system.universe.push_back(flows[i].id);
  }

  FlowsAtSwitch flows_at = flows_by_switch(topo, flows);

  for (SwitchId v = 0; v < topo.switch_count; ++v) {
    if (flows_at[v].empty()) continue;
    CandidateSet set;
    set.flow_ids = flows_at[v];
    set.action = {CandidateAction::Kind::poll_all, v};
    system.weights.push_back(model.l_req + reply_length(model, set.flow_ids.size()));
    system.sets.push_back(std::move(set));
  }
  system.poll_all_count = system.sets.size();

  const std::uint64_t single_weight = model.l_req + reply_length(model, 1);
  for (const Flow& flow : flows) {
    CandidateSet set;
    set.flow_ids = {flow.id};
    set.action = {CandidateAction::Kind::single_flow, flow.id};
    system.weights.push_back(single_weight);
    system.sets.push_back(std::move(set));
  }
  return system;
}

namespace {

// Dense index of a flow id within the (ascending) universe.
std::size_t universe_index(const std::vector<FlowId>& universe, FlowId id) {
  auto it = std::lower_bound(universe.begin(), universe.end(), id);
  if (it == universe.end() || *it != id)
    throw std::invalid_argument("set system names a flow outside its universe");
  return static_cast<std::size_t>(it - universe.begin());
}

// Selection order of the greedy loop, as a strict total order on candidate
// entries. Ratios weight/uncovered are compared exactly by cross
// multiplication in 128 bits, so no floating-point rounding can reorder two
// candidates. Ties prefer the smaller set (its reply stays smaller if the
// estimate of new coverage has gone stale), then poll-all over single-flow,
// then the lower switch/flow id.
struct HeapEntry {
  std::uint64_t weight = 0;
  std::uint64_t uncovered = 0;  // value when the entry was pushed
  std::uint64_t cardinality = 0;
  CandidateAction action;
  std::uint32_t set_index = 0;
};

bool pops_before(const HeapEntry& a, const HeapEntry& b) {
  const auto lhs = static_cast<unsigned __int128>(a.weight) * b.uncovered;
  const auto rhs = static_cast<unsigned __int128>(b.weight) * a.uncovered;
  if (lhs != rhs) return lhs < rhs;
  if (a.cardinality != b.cardinality) return a.cardinality < b.cardinality;
  if (a.action.kind != b.action.kind) return a.action.kind < b.action.kind;
  return a.action.id < b.action.id;
}

struct HeapCompare {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    return pops_before(b, a);  // priority_queue pops the largest, so invert
  }
};

std::vector<std::vector<std::uint32_t>> build_incidence(const WeightedSetSystem& system) {
  std::vector<std::vector<std::uint32_t>> sets_of(system.universe.size());
  for (std::uint32_t s = 0; s < system.sets.size(); ++s) {
    for (FlowId f : system.sets[s].flow_ids)
      sets_of[universe_index(system.universe, f)].push_back(s);
  }
  for (std::size_t f = 0; f < sets_of.size(); ++f) {
    if (sets_of[f].empty())
      throw std::invalid_argument("set system leaves a universe flow uncoverable");
  }
  return sets_of;
}

}  // namespace

CoverSolution greedy_cover(const WeightedSetSystem& system) {
  if (system.sets.size() != system.weights.size())
    throw std::invalid_argument("greedy_cover: sets and weights are misaligned");
  CoverSolution solution;
  const std::size_t m = system.universe.size();
  if (m == 0) return solution;

  const auto sets_of = build_incidence(system);

  // uncov[s] counts flows of set s not yet covered; kept exact as coverage
  // grows, so a popped heap entry is stale iff its snapshot differs.
  std::vector<std::uint64_t> uncov(system.sets.size());
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapCompare> heap;
  for (std::uint32_t s = 0; s < system.sets.size(); ++s) {
    uncov[s] = system.sets[s].flow_ids.size();
    if (uncov[s] > 0)
      heap.push({system.weights[s], uncov[s], system.sets[s].flow_ids.size(),
                 system.sets[s].action, s});
  }

  std::vector<char> covered(m, 0);
  std::size_t covered_count = 0;
  while (covered_count < m) {
    if (heap.empty())
      throw std::logic_error("greedy_cover: heap exhausted before the universe was covered");
    HeapEntry top = heap.top();
    heap.pop();
    if (uncov[top.set_index] == 0) continue;  // nothing new under it any more
    if (uncov[top.set_index] != top.uncovered) {
      top.uncovered = uncov[top.set_index];  // stale: re-rank with the current value
      heap.push(top);
      continue;
    }
    solution.chosen.push_back(top.set_index);
    solution.total_weight += top.weight;
    for (FlowId f : system.sets[top.set_index].flow_ids) {
      const std::size_t fi = universe_index(system.universe, f);
      if (covered[fi]) continue;
      covered[fi] = 1;
      ++covered_count;
      for (std::uint32_t s : sets_of[fi]) --uncov[s];
    }
  }
  std::sort(solution.chosen.begin(), solution.chosen.end());
  return solution;
}

namespace {

// Branch-and-bound state for exact_cover. The search tree decides, for each
// poll-all set in a fixed order, whether it is in the cover; single-flow sets
// never branch — closing every still-uncovered flow with its singleton is a
// feasible completion, evaluated at every node to update the incumbent.
struct ExactSearch {
  const WeightedSetSystem& system;
  std::vector<std::uint32_t> order;            // poll-all set indices, best ratio first
  std::vector<std::uint32_t> singleton_of;     // flow index -> its singleton set index
  std::vector<std::uint64_t> floor_ratio;      // flow index -> admissible per-flow bound
  std::vector<std::uint32_t> cover_count;      // flow index -> #included sets covering it
  std::vector<std::size_t> flow_index_of_set;  // flattened set -> flow index lists
  std::vector<std::vector<std::size_t>> set_flow_indices;

  std::uint64_t partial_weight = 0;
  std::uint64_t closure_sum = 0;  // singleton weights of uncovered flows
  std::uint64_t bound_sum = 0;    // floor ratios of uncovered flows
  std::vector<std::uint32_t> included;

  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint32_t> best_included;
  std::uint64_t nodes = 0;
  std::uint64_t budget = 0;
  bool exhausted = false;

  explicit ExactSearch(const WeightedSetSystem& sys) : system(sys) {}

  void include(std::uint32_t s) {
    partial_weight += system.weights[s];
    included.push_back(s);
    for (std::size_t fi : set_flow_indices[s]) {
      if (cover_count[fi]++ == 0) {
        closure_sum -= system.weights[singleton_of[fi]];
        bound_sum -= floor_ratio[fi];
      }
    }
  }

  void exclude(std::uint32_t s) {
    partial_weight -= system.weights[s];
    included.pop_back();
    for (std::size_t fi : set_flow_indices[s]) {
      if (--cover_count[fi] == 0) {
        closure_sum += system.weights[singleton_of[fi]];
        bound_sum += floor_ratio[fi];
      }
    }
  }

  std::uint64_t new_coverage(std::uint32_t s) const {
    std::uint64_t fresh = 0;
    for (std::size_t fi : set_flow_indices[s]) fresh += cover_count[fi] == 0;
    return fresh;
  }

  void visit(std::size_t depth) {
    if (exhausted) return;
    ++nodes;
    // The singleton closure of this node is feasible; take it if it improves.
    const std::uint64_t candidate = partial_weight + closure_sum;
    if (candidate < best) {
      best = candidate;
      best_included = included;
    }
    if (depth == order.size()) return;
    if (partial_weight + bound_sum >= best) return;  // no completion can improve
    if (nodes >= budget) {
      exhausted = true;
      return;
    }
    const std::uint32_t s = order[depth];
    if (new_coverage(s) > 0) {  // a set covering nothing new only adds weight
      include(s);
      visit(depth + 1);
      exclude(s);
    }
    visit(depth + 1);
  }
};

}  // namespace

ExactCoverResult exact_cover(const WeightedSetSystem& system, std::uint64_t node_budget) {
  if (system.sets.size() != system.weights.size())
    throw std::invalid_argument("exact_cover: sets and weights are misaligned");
  if (node_budget == 0) throw std::invalid_argument("exact_cover: zero node budget");

  ExactCoverResult result;
  const std::size_t m = system.universe.size();
  if (m == 0) {
    result.proven = true;
    result.nodes_visited = 1;
    return result;
  }

  ExactSearch search(system);
  search.budget = node_budget;

  // The completion step leans on construct_weighted_sets's shape: after the
  // poll-all block, exactly one singleton per universe flow.
  if (system.poll_all_count > system.sets.size())
    throw std::invalid_argument("exact_cover: poll_all_count exceeds set count");
  search.singleton_of.assign(m, 0);
  std::vector<char> has_singleton(m, 0);
  for (std::uint32_t s = static_cast<std::uint32_t>(system.poll_all_count);
       s < system.sets.size(); ++s) {
    const CandidateSet& set = system.sets[s];
    if (set.action.kind != CandidateAction::Kind::single_flow || set.flow_ids.size() != 1)
      throw std::invalid_argument("exact_cover: non-singleton set after the poll-all block");
    const std::size_t fi = universe_index(system.universe, set.flow_ids[0]);
    if (has_singleton[fi])
      throw std::invalid_argument("exact_cover: duplicate singleton for a flow");
    has_singleton[fi] = 1;
    search.singleton_of[fi] = s;
  }
  for (std::size_t fi = 0; fi < m; ++fi) {
    if (!has_singleton[fi])
      throw std::invalid_argument("exact_cover: flow without a singleton set");
  }

  search.set_flow_indices.resize(system.sets.size());
  for (std::uint32_t s = 0; s < system.sets.size(); ++s) {
    search.set_flow_indices[s].reserve(system.sets[s].flow_ids.size());
    for (FlowId f : system.sets[s].flow_ids)
      search.set_flow_indices[s].push_back(universe_index(system.universe, f));
  }

  search.floor_ratio.assign(m, std::numeric_limits<std::uint64_t>::max());
  for (std::uint32_t s = 0; s < system.sets.size(); ++s) {
    const std::uint64_t ratio = system.weights[s] / system.sets[s].flow_ids.size();
    for (std::size_t fi : search.set_flow_indices[s])
      search.floor_ratio[fi] = std::min(search.floor_ratio[fi], ratio);
  }

  search.cover_count.assign(m, 0);
  for (std::size_t fi = 0; fi < m; ++fi) {
    search.closure_sum += system.weights[search.singleton_of[fi]];
    search.bound_sum += search.floor_ratio[fi];
  }

  search.order.resize(system.poll_all_count);
  for (std::uint32_t s = 0; s < system.poll_all_count; ++s) search.order[s] = s;
  std::sort(search.order.begin(), search.order.end(),
            [&system](std::uint32_t a, std::uint32_t b) {
              HeapEntry ea{system.weights[a], system.sets[a].flow_ids.size(),
                           system.sets[a].flow_ids.size(), system.sets[a].action, a};
              HeapEntry eb{system.weights[b], system.sets[b].flow_ids.size(),
                           system.sets[b].flow_ids.size(), system.sets[b].action, b};
              return pops_before(ea, eb);
            });

  search.visit(0);

  // Rebuild the winning cover: the recorded poll-all picks plus singletons
  // for whatever they leave uncovered.
  std::vector<char> covered(m, 0);
  for (std::uint32_t s : search.best_included) {
    result.solution.chosen.push_back(s);
    for (std::size_t fi : search.set_flow_indices[s]) covered[fi] = 1;
  }
  for (std::size_t fi = 0; fi < m; ++fi) {
    if (!covered[fi]) result.solution.chosen.push_back(search.singleton_of[fi]);
  }
  std::sort(result.solution.chosen.begin(), result.solution.chosen.end());
  result.solution.total_weight = search.best;
  result.proven = !search.exhausted;
  result.nodes_visited = search.nodes;
  return result;
}

PollingScheme decode_scheme(const WeightedSetSystem& system, const CoverSolution& solution,
                            const std::vector<Flow>& flows) {
  if (flows.size() != system.universe.size())
    throw std::invalid_argument("decode_scheme: flows do not match the system universe");
  for (std::size_t i = 0; i < flows.size(); ++i) {
    if (flows[i].id != system.universe[i])
      throw std::invalid_argument("decode_scheme: flows do not match the system universe");
  }

  PollingScheme scheme;
  std::vector<FlowId> single_flows;
  for (std::uint32_t s : solution.chosen) {
    if (s >= system.sets.size())
      throw std::invalid_argument("decode_scheme: chosen set index out of range");
    const CandidateAction action = system.sets[s].action;
    if (action.kind == CandidateAction::Kind::poll_all)
      scheme.poll_all.push_back(action.id);
    else
      single_flows.push_back(action.id);
  }
  std::sort(scheme.poll_all.begin(), scheme.poll_all.end());
  std::sort(single_flows.begin(), single_flows.end());

  for (FlowId f : single_flows) {
    const Flow& flow = flows[universe_index(system.universe, f)];
    bool redundant = false;
    for (SwitchId v : flow.path) {
      if (scheme.polls_all(v)) {
        redundant = true;
        break;
      }
    }
    if (!redundant) scheme.single_polls.push_back({f, flow.last_switch()});
  }
  return scheme;
}

}  // namespace flowcover
