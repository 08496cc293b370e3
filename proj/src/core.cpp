#include "flowcover/core.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace flowcover {

std::vector<std::vector<SwitchId>> Topology::adjacency() const {
  std::vector<std::vector<SwitchId>> adj(switch_count);
  for (const Link& link : links) {
    adj[link.u].push_back(link.v);
    adj[link.v].push_back(link.u);
  }
  for (auto& neighbors : adj) std::sort(neighbors.begin(), neighbors.end());
  return adj;
}

bool Topology::is_loss(SwitchId v) const {
  return std::binary_search(loss_switches.begin(), loss_switches.end(), v);
}

namespace {

bool connected(const Topology& topo) {
  if (topo.switch_count == 0) return true;
  auto adj = topo.adjacency();
  std::vector<char> seen(topo.switch_count, 0);
  std::vector<SwitchId> stack = {0};
  seen[0] = 1;
  SwitchId reached = 1;
  while (!stack.empty()) {
    SwitchId v = stack.back();
    stack.pop_back();
    for (SwitchId w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == topo.switch_count;
}

}  // namespace

void validate_topology(const Topology& topo) {
  for (const Link& link : topo.links) {
    if (link.u >= link.v)
      throw std::invalid_argument("topology: link endpoints must satisfy u < v");
    if (!topo.has_switch(link.v))
      throw std::invalid_argument("topology: link endpoint out of range");
  }
  if (!std::is_sorted(topo.links.begin(), topo.links.end()))
    throw std::invalid_argument("topology: links must be sorted");
  if (std::adjacent_find(topo.links.begin(), topo.links.end()) != topo.links.end())
    throw std::invalid_argument("topology: duplicate link");
  for (SwitchId v : topo.loss_switches) {
    if (!topo.has_switch(v))
      throw std::invalid_argument("topology: loss switch out of range");
  }
  if (!std::is_sorted(topo.loss_switches.begin(), topo.loss_switches.end()))
    throw std::invalid_argument("topology: loss switches must be sorted");
  if (std::adjacent_find(topo.loss_switches.begin(), topo.loss_switches.end()) !=
      topo.loss_switches.end())
    throw std::invalid_argument("topology: duplicate loss switch");
  if (!topo.coordinates.empty() && topo.coordinates.size() != topo.switch_count)
    throw std::invalid_argument("topology: coordinates must be empty or one per switch");
  if (!connected(topo))
    throw std::invalid_argument("topology: graph is not connected");
}

namespace {

void validate_flow_against(const std::vector<std::vector<SwitchId>>& adj,
                           const Topology& topo, const Flow& flow) {
  if (flow.path.empty())
    throw std::invalid_argument("flow " + std::to_string(flow.id) + ": empty path");
  std::vector<SwitchId> sorted_path = flow.path;
  std::sort(sorted_path.begin(), sorted_path.end());
  if (std::adjacent_find(sorted_path.begin(), sorted_path.end()) != sorted_path.end())
    throw std::invalid_argument("flow " + std::to_string(flow.id) + ": path repeats a switch");
  for (SwitchId v : flow.path) {
    if (!topo.has_switch(v))
      throw std::invalid_argument("flow " + std::to_string(flow.id) +
                                  ": path leaves the topology");
  }
  for (std::size_t i = 0; i + 1 < flow.path.size(); ++i) {
    const auto& neighbors = adj[flow.path[i]];
    if (!std::binary_search(neighbors.begin(), neighbors.end(), flow.path[i + 1]))
      throw std::invalid_argument("flow " + std::to_string(flow.id) +
                                  ": consecutive path switches are not linked");
  }
  if (flow.packet_size_bytes == 0)
    throw std::invalid_argument("flow " + std::to_string(flow.id) + ": zero packet size");
  if (flow.volume_bytes % flow.packet_size_bytes != 0)
    throw std::invalid_argument("flow " + std::to_string(flow.id) +
                                ": volume is not a whole number of packets");
}

}  // namespace

void validate_flow(const Topology& topo, const Flow& flow) {
  validate_flow_against(topo.adjacency(), topo, flow);
}

void validate_flows(const Topology& topo, const std::vector<Flow>& flows) {
  auto adj = topo.adjacency();
  for (std::size_t i = 0; i < flows.size(); ++i) {
    if (i > 0 && flows[i - 1].id >= flows[i].id)
      throw std::invalid_argument("flows must have strictly increasing ids");
    validate_flow_against(adj, topo, flows[i]);
  }
}

std::uint64_t reply_length(const CostModel& model, std::uint64_t n_entries) {
  return model.l_reply_header + model.l_single_flow_entry * n_entries;
}

std::uint64_t per_flow_baseline_cost(const CostModel& model, std::uint64_t flow_count) {
  return (model.l_req + reply_length(model, 1)) * flow_count;
}

bool PollingScheme::polls_all(SwitchId v) const {
  return std::binary_search(poll_all.begin(), poll_all.end(), v);
}

const SinglePoll* PollingScheme::single_for(FlowId flow) const {
  auto it = std::lower_bound(single_polls.begin(), single_polls.end(), flow,
                             [](const SinglePoll& sp, FlowId f) { return sp.flow < f; });
  if (it == single_polls.end() || it->flow != flow) return nullptr;
  return &*it;
}

FlowsAtSwitch flows_by_switch(const Topology& topo, const std::vector<Flow>& flows) {
  FlowsAtSwitch flows_at(topo.switch_count);
  for (const Flow& flow : flows) {
    for (SwitchId v : flow.path) {
      if (!topo.has_switch(v))
        throw std::invalid_argument("flows_by_switch: path switch out of range");
      flows_at[v].push_back(flow.id);
    }
  }
  return flows_at;
}

std::uint64_t scheme_cost(const CostModel& model, const PollingScheme& scheme,
                          const FlowsAtSwitch& flows_at) {
  std::uint64_t total = 0;
  for (SwitchId v : scheme.poll_all) {
    if (v >= flows_at.size())
      throw std::invalid_argument("scheme_cost: poll-all switch out of range");
    total += model.l_req + reply_length(model, flows_at[v].size());
  }
  total += (model.l_req + reply_length(model, 1)) * scheme.single_polls.size();
  return total;
}

bool covers(const PollingScheme& scheme, const Flow& flow) {
  for (SwitchId v : flow.path) {
    if (scheme.polls_all(v)) return true;
  }
  return scheme.single_for(flow.id) != nullptr;
}

}  // namespace flowcover
