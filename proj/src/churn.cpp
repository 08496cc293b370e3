#include "flowcover/churn.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "flowcover/setcover.hpp"

namespace flowcover {

namespace {

PollingScheme solve_greedy(const Topology& topo, const std::vector<Flow>& flows,
                           const CostModel& model) {
  const WeightedSetSystem system = construct_weighted_sets(topo, flows, model);
  return decode_scheme(system, greedy_cover(system), flows);
}

std::vector<Flow> active_vector(const std::map<FlowId, Flow>& active) {
  std::vector<Flow> flows;
  flows.reserve(active.size());
  for (const auto& [id, flow] : active) flows.push_back(flow);
  return flows;
}

}  // namespace

ChurnState make_churn_state(const Topology& topo, const std::vector<Flow>& flows,
                            const CostModel& model, std::uint32_t recompute_interval) {
  if (recompute_interval == 0)
    throw std::invalid_argument("make_churn_state: recompute interval must be at least 1");
  ChurnState state;
  state.recompute_interval = recompute_interval;
  state.scheme = solve_greedy(topo, flows, model);
  for (const Flow& flow : flows) {
    auto [it, inserted] = state.active_flows.emplace(flow.id, flow);
    if (!inserted)
      throw std::invalid_argument("make_churn_state: duplicate flow id " +
                                  std::to_string(flow.id));
  }
  return state;
}

ChurnState on_flow_arrival(ChurnState state, Flow flow) {
  const FlowId id = flow.id;
  if (state.active_flows.contains(id))
    throw std::invalid_argument("on_flow_arrival: duplicate flow id " + std::to_string(id));
  if (flow.path.empty())
    throw std::invalid_argument("on_flow_arrival: flow has an empty path");
  const bool already_covered = covers(state.scheme, flow);
  const SwitchId last = flow.last_switch();
  state.active_flows.emplace(id, std::move(flow));
  if (!already_covered) {
    auto& singles = state.scheme.single_polls;
    auto it = std::lower_bound(singles.begin(), singles.end(), id,
                               [](const SinglePoll& sp, FlowId f) { return sp.flow < f; });
    singles.insert(it, {id, last});
  }
  return state;
}

ChurnState on_flow_expiry(ChurnState state, FlowId flow_id) {
  auto it = state.active_flows.find(flow_id);
  if (it == state.active_flows.end())
    throw std::invalid_argument("on_flow_expiry: unknown flow id " + std::to_string(flow_id));
  state.active_flows.erase(it);
  auto& singles = state.scheme.single_polls;
  auto sp = std::lower_bound(singles.begin(), singles.end(), flow_id,
                             [](const SinglePoll& s, FlowId f) { return s.flow < f; });
  if (sp != singles.end() && sp->flow == flow_id) singles.erase(sp);
  return state;
}

ChurnState maybe_recompute(ChurnState state, const Topology& topo, const CostModel& model) {
  if (++state.polls_since_recompute >= state.recompute_interval) {
    state.scheme = solve_greedy(topo, active_vector(state.active_flows), model);
    state.polls_since_recompute = 0;
  }
  return state;
}

std::uint64_t active_scheme_cost(const ChurnState& state, const Topology& topo,
                                 const CostModel& model) {
  return scheme_cost(model, state.scheme,
                     flows_by_switch(topo, active_vector(state.active_flows)));
}

ChurnState apply_event(ChurnState state, const ChurnEvent& event) {
  if (event.kind == ChurnEvent::Kind::arrive)
    return on_flow_arrival(std::move(state), event.flow);
  return on_flow_expiry(std::move(state), event.flow.id);
}

}  // namespace flowcover
