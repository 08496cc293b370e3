#pragma once

#include <cstdint>
#include <vector>

namespace flowcover {

using SwitchId = std::uint32_t;
using FlowId = std::uint32_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Undirected edge, normalized so u < v.
struct Link {
  SwitchId u = 0;
  SwitchId v = 0;
  friend auto operator<=>(const Link&, const Link&) = default;
};

// Switch graph plus per-switch loss annotations. Switch ids are dense
// 0..switch_count-1. Coordinates are either empty or one point per switch
// (geometric generators fill them in; they are carried so instances
// round-trip through files without loss).
struct Topology {
  SwitchId switch_count = 0;
  std::vector<Link> links;              // sorted ascending, u < v, no duplicates
  std::vector<SwitchId> loss_switches;  // sorted ascending, subset of the switches
  std::vector<Point2> coordinates;      // empty or exactly switch_count entries

  std::vector<std::vector<SwitchId>> adjacency() const;  // neighbor lists, ascending
  bool is_loss(SwitchId v) const;
  bool has_switch(SwitchId v) const { return v < switch_count; }
};

// Throws std::invalid_argument on self loops, out-of-range endpoints,
// unsorted/duplicate links, bad loss or coordinate shape, or a disconnected
// graph (every topology here is required to be connected).
void validate_topology(const Topology& topo);

// One monitored flow. The path lists every switch the flow traverses, in
// order; volume is a whole number of packets.
struct Flow {
  FlowId id = 0;
  std::vector<SwitchId> path;
  std::uint64_t volume_bytes = 0;
  std::uint32_t packet_size_bytes = 1500;

  std::uint64_t packet_count() const { return volume_bytes / packet_size_bytes; }
  SwitchId first_switch() const { return path.front(); }
  SwitchId last_switch() const { return path.back(); }
};

// Throws std::invalid_argument if the path is empty, repeats a switch, leaves
// the topology, or takes a hop with no link; also checks packet alignment.
void validate_flow(const Topology& topo, const Flow& flow);

// Validates every flow (building adjacency once) and requires strictly
// increasing flow ids.
void validate_flows(const Topology& topo, const std::vector<Flow>& flows);

// Message sizes in bytes for one statistics request and its reply, as laid
// down by the OpenFlow 1.0 wire format.
struct CostModel {
  std::uint64_t l_req = 122;
  std::uint64_t l_reply_header = 78;
  std::uint64_t l_single_flow_entry = 96;
};

// Reply carrying n flow entries: header plus n fixed-size entries.
std::uint64_t reply_length(const CostModel& model, std::uint64_t n_entries);

// Cost of the naive strategy that sends one single-flow request per flow.
std::uint64_t per_flow_baseline_cost(const CostModel& model, std::uint64_t flow_count);

// A single-flow statistics request for one flow, addressed to one switch on
// its path.
struct SinglePoll {
  FlowId flow = 0;
  SwitchId sw = 0;
  friend auto operator<=>(const SinglePoll&, const SinglePoll&) = default;
};

// The optimizer's output: switches polled with one poll-all request each,
// plus per-flow single polls for everything not covered by those.
struct PollingScheme {
  std::vector<SwitchId> poll_all;        // sorted ascending, unique
  std::vector<SinglePoll> single_polls;  // sorted by flow id, at most one per flow

  bool polls_all(SwitchId v) const;
  const SinglePoll* single_for(FlowId flow) const;  // nullptr when absent
};

// flows_at[v] lists (ascending) the ids of flows whose path visits switch v.
using FlowsAtSwitch = std::vector<std::vector<FlowId>>;

FlowsAtSwitch flows_by_switch(const Topology& topo, const std::vector<Flow>& flows);

// Bytes on the wire for one polling round under the scheme: each poll-all
// switch pays a request plus a reply with one entry per flow it carries; each
// single poll pays a request plus a one-entry reply. Throws if the scheme
// names a switch outside flows_at.
std::uint64_t scheme_cost(const CostModel& model, const PollingScheme& scheme,
                          const FlowsAtSwitch& flows_at);

// True when the scheme observes the flow: some switch on its path is polled
// in full, or the flow has a single poll.
bool covers(const PollingScheme& scheme, const Flow& flow);

// A topology together with the flows monitored on it — the unit that
// generators produce, files carry, and solvers consume. Flows are kept sorted
// by strictly increasing id.
struct Instance {
  Topology topo;
  std::vector<Flow> flows;
};

}  // namespace flowcover
