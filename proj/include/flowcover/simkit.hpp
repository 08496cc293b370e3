#pragma once

#include <cstdint>
#include <vector>

#include "flowcover/core.hpp"
#include "flowcover/rng.hpp"

namespace flowcover {

// How many fresh graphs a generator may draw before giving up on finding a
// connected one.
inline constexpr int kConnectivityAttempts = 100;

// G(n, p): every unordered switch pair is linked independently with
// probability p. Redraws (attempt k uses substream(seed, k)) until the graph
// is connected; throws std::runtime_error after kConnectivityAttempts misses.
Topology gen_erdos_renyi(SwitchId n, double p, RngSeed seed);

// Waxman random geometric graph: switches get uniform coordinates in the unit
// square and pair (u, v) is linked with probability
// alpha * exp(-d(u,v) / (beta * L)), L being the largest pairwise distance.
// Coordinates are kept on the topology. Same connectivity retry policy as
// gen_erdos_renyi.
Topology gen_waxman(SwitchId n, double alpha, double beta, RngSeed seed);

struct VolumeRange {
  std::uint64_t lo_bytes = 15'000;
  std::uint64_t hi_bytes = 15'000'000;
};

// Draws flows with ids 0..flow_count-1: uniform ordered (src, dst) pairs with
// src != dst, the deterministic BFS shortest path between them (ties broken
// toward lower-numbered neighbors), and log-uniform volumes over the range
// rounded down to whole packets (at least one packet). Per flow the draw
// order is src, dst, volume.
std::vector<Flow> gen_flows(const Topology& topo, std::uint32_t flow_count,
                            VolumeRange volumes, RngSeed seed,
                            std::uint32_t packet_size_bytes = 1500);

// Incremental flow source sharing gen_flows's path and volume rules; used
// where flows appear one at a time (churn) against a fixed topology. BFS
// trees are cached per source, which changes nothing observable.
class FlowFactory {
 public:
  FlowFactory(const Topology& topo, VolumeRange volumes, std::uint32_t packet_size_bytes);

  Flow make(FlowId id, SplitMix64& rng);

 private:
  const Topology& topo_;
  VolumeRange volumes_;
  std::uint32_t packet_size_;
  std::vector<std::vector<SwitchId>> adjacency_;
  std::vector<std::vector<SwitchId>> parent_trees_;  // lazily built, one per source
  std::vector<char> tree_ready_;
};

// Returns the topology with round(ratio * switch_count) switches, drawn
// uniformly without replacement, marked as lossy (replacing any previous
// marks).
Topology mark_loss_switches(Topology topo, double ratio, RngSeed seed);

// Per-flow byte counters along each flow's path: bytes[i][j] is what switch
// flows[i].path[j] counted for flows[i]. Row i is aligned with the flows
// vector the table was simulated from.
struct CounterTable {
  std::vector<std::vector<std::uint64_t>> bytes;
};

// Replays every flow packet by packet: each switch on the path counts the
// packets that reach it, then a lossy switch drops each surviving packet
// independently with probability loss_rate. Each flow draws from its own
// substream keyed by flow id, so results do not depend on evaluation order;
// the parallel and serial variants return bit-identical tables.
CounterTable simulate_counters(const Topology& topo, const std::vector<Flow>& flows,
                               double loss_rate, RngSeed seed);

// Reference implementation without the parallel loop, kept for equivalence
// tests and benchmarking.
CounterTable simulate_counters_serial(const Topology& topo, const std::vector<Flow>& flows,
                                      double loss_rate, RngSeed seed);

}  // namespace flowcover
