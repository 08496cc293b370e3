#include "flowcover/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace flowcover {

namespace {

bool is_connected(const Topology& topo) {
  try {
    validate_topology(topo);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

void sort_links(Topology& topo) { std::sort(topo.links.begin(), topo.links.end()); }

}  // namespace

Topology gen_erdos_renyi(SwitchId n, double p, RngSeed seed) {
  if (n == 0) throw std::invalid_argument("gen_erdos_renyi: need at least one switch");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("gen_erdos_renyi: p must lie in [0, 1]");
  for (int attempt = 0; attempt < kConnectivityAttempts; ++attempt) {
    SplitMix64 rng(substream(seed, static_cast<std::uint64_t>(attempt)));
    Topology topo;
    topo.switch_count = n;
    for (SwitchId u = 0; u + 1 < n; ++u) {
      for (SwitchId v = u + 1; v < n; ++v) {
        if (rng.next_bernoulli(p)) topo.links.push_back({u, v});
      }
    }
    sort_links(topo);
    if (is_connected(topo)) return topo;
  }
  throw std::runtime_error("gen_erdos_renyi: no connected graph in " +
                           std::to_string(kConnectivityAttempts) + " attempts (n=" +
                           std::to_string(n) + ", p=" + std::to_string(p) + ")");
}

Topology gen_waxman(SwitchId n, double alpha, double beta, RngSeed seed) {
  if (n == 0) throw std::invalid_argument("gen_waxman: need at least one switch");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("gen_waxman: alpha must lie in (0, 1]");
  if (!(beta > 0.0)) throw std::invalid_argument("gen_waxman: beta must be positive");
  for (int attempt = 0; attempt < kConnectivityAttempts; ++attempt) {
    SplitMix64 rng(substream(seed, static_cast<std::uint64_t>(attempt)));
    Topology topo;
    topo.switch_count = n;
    topo.coordinates.resize(n);
    for (SwitchId v = 0; v < n; ++v) {
      topo.coordinates[v].x = rng.next_double();
      topo.coordinates[v].y = rng.next_double();
    }
    double max_distance = 0.0;
    for (SwitchId u = 0; u + 1 < n; ++u) {
      for (SwitchId v = u + 1; v < n; ++v) {
        const double dx = topo.coordinates[u].x - topo.coordinates[v].x;
        const double dy = topo.coordinates[u].y - topo.coordinates[v].y;
        max_distance = std::max(max_distance, std::sqrt(dx * dx + dy * dy));
      }
    }
    for (SwitchId u = 0; u + 1 < n; ++u) {
      for (SwitchId v = u + 1; v < n; ++v) {
        const double dx = topo.coordinates[u].x - topo.coordinates[v].x;
        const double dy = topo.coordinates[u].y - topo.coordinates[v].y;
        const double d = std::sqrt(dx * dx + dy * dy);
        // max_distance is 0 only when all switches coincide; exp -> 1 there.
        const double link_p =
            max_distance > 0.0 ? alpha * std::exp(-d / (beta * max_distance)) : alpha;
        if (rng.next_bernoulli(link_p)) topo.links.push_back({u, v});
      }
    }
    sort_links(topo);
    if (is_connected(topo)) return topo;
  }
  throw std::runtime_error("gen_waxman: no connected graph in " +
                           std::to_string(kConnectivityAttempts) + " attempts (n=" +
                           std::to_string(n) + ")");
}

FlowFactory::FlowFactory(const Topology& topo, VolumeRange volumes,
                         std::uint32_t packet_size_bytes)
    : topo_(topo), volumes_(volumes), packet_size_(packet_size_bytes) {
  if (packet_size_ == 0) throw std::invalid_argument("FlowFactory: zero packet size");
  if (volumes_.lo_bytes == 0 || volumes_.lo_bytes > volumes_.hi_bytes)
    throw std::invalid_argument("FlowFactory: bad volume range");
  if (topo_.switch_count < 2)
    throw std::invalid_argument("FlowFactory: flows need at least two switches");
  adjacency_ = topo_.adjacency();
  parent_trees_.resize(topo_.switch_count);
  tree_ready_.assign(topo_.switch_count, 0);
}

Flow FlowFactory::make(FlowId id, SplitMix64& rng) {
  const SwitchId n = topo_.switch_count;
  const auto src = static_cast<SwitchId>(rng.next_below(n));
  auto dst = static_cast<SwitchId>(rng.next_below(n - 1));
  if (dst >= src) ++dst;

  if (!tree_ready_[src]) {
    // BFS with neighbors scanned in ascending order: the recorded parents
    // give one canonical shortest path to every destination.
    auto& parent = parent_trees_[src];
    parent.assign(n, n);  // n = unvisited sentinel
    parent[src] = src;
    std::vector<SwitchId> queue = {src};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const SwitchId v = queue[head];
      for (SwitchId w : adjacency_[v]) {
        if (parent[w] == n) {
          parent[w] = v;
          queue.push_back(w);
        }
      }
    }
    tree_ready_[src] = 1;
  }

  Flow flow;
  flow.id = id;
  flow.packet_size_bytes = packet_size_;
  const auto& parent = parent_trees_[src];
  if (parent[dst] == n)
    throw std::logic_error("FlowFactory: destination unreachable in a connected topology");
  for (SwitchId v = dst; v != src; v = parent[v]) flow.path.push_back(v);
  flow.path.push_back(src);
  std::reverse(flow.path.begin(), flow.path.end());

  const double lo = static_cast<double>(volumes_.lo_bytes);
  const double hi = static_cast<double>(volumes_.hi_bytes);
  const double raw = std::exp(std::log(lo) + rng.next_double() * (std::log(hi) - std::log(lo)));
  auto volume = static_cast<std::uint64_t>(raw / packet_size_) * packet_size_;
  flow.volume_bytes = std::max<std::uint64_t>(volume, packet_size_);
  return flow;
}

std::vector<Flow> gen_flows(const Topology& topo, std::uint32_t flow_count,
                            VolumeRange volumes, RngSeed seed,
                            std::uint32_t packet_size_bytes) {
  std::vector<Flow> flows;
  if (flow_count == 0) return flows;
  FlowFactory factory(topo, volumes, packet_size_bytes);
  SplitMix64 rng(seed);
  flows.reserve(flow_count);
  for (FlowId id = 0; id < flow_count; ++id) flows.push_back(factory.make(id, rng));
  return flows;
}

Topology mark_loss_switches(Topology topo, double ratio, RngSeed seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0))
    throw std::invalid_argument("mark_loss_switches: ratio must lie in [0, 1]");
  const auto n = static_cast<std::uint64_t>(topo.switch_count);
  const auto k = static_cast<std::uint64_t>(std::llround(ratio * static_cast<double>(n)));
  SplitMix64 rng(seed);
  std::vector<SwitchId> ids(n);
  for (SwitchId v = 0; v < topo.switch_count; ++v) ids[v] = v;
  // Partial Fisher-Yates: after k swaps the prefix is a uniform k-subset.
  for (std::uint64_t i = 0; i < k; ++i)
    std::swap(ids[i], ids[i + rng.next_below(n - i)]);
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  topo.loss_switches = std::move(ids);
  return topo;
}

namespace {

// One flow's walk down its path: count, then drop. Deterministic given the
// flow's substream, so the caller may schedule flows in any order.
void walk_flow(const Topology& topo, const Flow& flow, double loss_rate, RngSeed seed,
               std::vector<std::uint64_t>& row) {
  SplitMix64 rng(substream(seed, flow.id));
  std::uint64_t packets = flow.packet_count();
  row.resize(flow.path.size());
  for (std::size_t j = 0; j < flow.path.size(); ++j) {
    row[j] = packets * flow.packet_size_bytes;
    if (loss_rate > 0.0 && packets > 0 && topo.is_loss(flow.path[j])) {
      std::uint64_t survivors = 0;
      for (std::uint64_t q = 0; q < packets; ++q)
        survivors += !rng.next_bernoulli(loss_rate);
      packets = survivors;
    }
  }
}

}  // namespace

CounterTable simulate_counters(const Topology& topo, const std::vector<Flow>& flows,
                               double loss_rate, RngSeed seed) {
  if (!(loss_rate >= 0.0 && loss_rate <= 1.0))
    throw std::invalid_argument("simulate_counters: loss rate must lie in [0, 1]");
  CounterTable table;
  table.bytes.resize(flows.size());
  const auto count = static_cast<std::int64_t>(flows.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i)
    walk_flow(topo, flows[i], loss_rate, seed, table.bytes[i]);
  return table;
}

CounterTable simulate_counters_serial(const Topology& topo, const std::vector<Flow>& flows,
                                      double loss_rate, RngSeed seed) {
  if (!(loss_rate >= 0.0 && loss_rate <= 1.0))
    throw std::invalid_argument("simulate_counters: loss rate must lie in [0, 1]");
  CounterTable table;
  table.bytes.resize(flows.size());
  for (std::size_t i = 0; i < flows.size(); ++i)
    walk_flow(topo, flows[i], loss_rate, seed, table.bytes[i]);
  return table;
}

}  // namespace flowcover
