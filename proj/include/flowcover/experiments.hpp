#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "flowcover/churn.hpp"
#include "flowcover/core.hpp"
#include "flowcover/rng.hpp"
#include "flowcover/setcover.hpp"
#include "flowcover/simkit.hpp"

namespace flowcover {

// --- measurement ------------------------------------------------------------

struct FlowMeasurement {
  FlowId flow = 0;
  SwitchId polled_switch = 0;
  std::uint64_t real_bytes = 0;      // delivered at the end of the path
  std::uint64_t measured_bytes = 0;  // counter at the polled switch
};

struct MeasurementReport {
  std::vector<FlowMeasurement> per_flow;
  double afr = 1.0;          // fraction of flows whose measurement is byte-exact
  double tm_accuracy = 1.0;  // 1 - sum |measured - real| / sum real
  std::uint64_t total_cost_bytes = 0;
  std::uint64_t baseline_cost_bytes = 0;
};

// Reads each flow off the counter table at its polled switch: the flow's
// single-poll switch when it has one, otherwise the earliest poll-all switch
// on its path. The reference value per flow is the counter at its final
// switch — the bytes that actually crossed the network. Throws if the scheme
// leaves a flow unobserved or the table does not match the flows.
MeasurementReport measure(const Topology& topo, const CostModel& model,
                          const PollingScheme& scheme, const CounterTable& counters,
                          const std::vector<Flow>& flows);

// --- result records ---------------------------------------------------------

using RecordValue = std::variant<std::uint64_t, std::int64_t, double, std::string>;

struct RecordField {
  std::string name;
  RecordValue value;
};

using Record = std::vector<RecordField>;

// All records in one batch must share the same field names in the same order.
void write_records_csv(std::ostream& out, const std::vector<Record>& records);
void write_records_jsonl(std::ostream& out, const std::vector<Record>& records);

// --- shared scenario plumbing -----------------------------------------------

enum class TopoKind : std::uint8_t { erdos_renyi = 0, waxman = 1 };

std::string topo_kind_name(TopoKind kind);  // "er" / "waxman"

struct TopoParams {
  TopoKind kind = TopoKind::erdos_renyi;
  SwitchId n = 200;
  double er_p = 0.0;  // <= 0 picks default_er_p(n)
  double waxman_alpha = 0.15;
  double waxman_beta = 0.2;
};

// 2 ln(n) / n, safely above the G(n, p) connectivity threshold ln(n) / n.
double default_er_p(SwitchId n);

Topology make_topology(const TopoParams& params, RngSeed seed);

// Per-stage stream keys. Every scenario derives its stage seeds from the run
// seed with these, so `gen-topo --seed S` produces exactly the topology that
// `solve --seed S` works on.
inline constexpr std::uint64_t kTopoStream = 0;
inline constexpr std::uint64_t kFlowStream = 1;
inline constexpr std::uint64_t kLossStream = 2;
inline constexpr std::uint64_t kCounterStream = 3;
inline constexpr std::uint64_t kChurnStream = 4;

Instance make_instance(const TopoParams& params, std::uint32_t flow_count,
                       VolumeRange volumes, std::uint32_t packet_size, RngSeed run_seed);

// --- polling cost vs the per-flow baseline -----------------------------------

struct CostExperimentParams {
  TopoParams topo;
  std::vector<std::uint32_t> flow_counts{1000, 20000, 100000};
  VolumeRange volumes;
  std::uint32_t packet_size = 1500;
  std::uint32_t trials = 1;  // trial t runs with seed.value + t
  RngSeed seed;
};

struct CostRecord {
  TopoKind kind = TopoKind::erdos_renyi;
  SwitchId n = 0;
  std::uint32_t m = 0;
  std::uint64_t seed = 0;
  std::uint64_t flowcover_cost = 0;
  std::uint64_t baseline_cost = 0;
  double savings = 0.0;  // 1 - flowcover_cost / baseline_cost
  std::uint32_t poll_all_switches = 0;
  std::uint32_t single_polls = 0;
};

std::vector<CostRecord> run_cost_experiment(const CostExperimentParams& params);

// --- cost as a function of the poll-all budget --------------------------------

struct SweepParams {
  TopoParams topo;  // n defaults to 100 at the CLI for this scenario
  std::uint32_t m = 20000;
  VolumeRange volumes;
  std::uint32_t packet_size = 1500;
  RngSeed seed;
};

struct SweepRecord {
  std::uint32_t k = 0;             // poll-all switches in use
  std::uint64_t covered = 0;       // flows they cover
  std::uint64_t total_cost = 0;    // their cost plus single polls for the rest
};

// Ranks switches by how many still-uncovered flows each would add (ties to
// the lower id) and prices every prefix of that ranking: k = 0 is the pure
// per-flow baseline, k = n polls everything everywhere. n + 1 records.
std::vector<SweepRecord> run_poll_all_sweep(const SweepParams& params);

// --- optimizer overhead --------------------------------------------------------

struct OverheadParams {
  TopoParams topo;  // used for the flow sweep; the switch sweep varies its n
  std::vector<std::uint32_t> flow_counts{10000, 20000, 30000, 40000,  50000,
                                         60000, 70000, 80000, 90000, 100000};
  std::uint32_t fixed_m = 20000;
  std::vector<SwitchId> switch_counts{50, 100, 150, 200, 250, 300, 350, 400};
  std::uint32_t repetitions = 3;
  VolumeRange volumes;
  std::uint32_t packet_size = 1500;
  RngSeed seed;
};

struct OverheadRecord {
  std::string sweep;  // "flows" or "switches"
  SwitchId n = 0;
  std::uint32_t m = 0;
  double construct_seconds = 0.0;  // min over repetitions
  double solve_seconds = 0.0;      // construct + greedy, min over repetitions
};

std::vector<OverheadRecord> run_overhead_experiment(const OverheadParams& params);

// --- measurement accuracy under loss -----------------------------------------

struct AccuracyParams {
  TopoParams topo;
  std::uint32_t m = 20000;
  double loss_rate = 0.01;
  double loss_switch_ratio = 0.10;
  VolumeRange volumes;
  std::uint32_t packet_size = 1500;
  std::uint32_t trials = 1;  // trial t runs with seed.value + t
  RngSeed seed;
};

struct AccuracyRecord {
  std::uint64_t seed = 0;
  std::uint32_t m = 0;
  double loss_rate = 0.0;
  double loss_switch_ratio = 0.0;
  double afr = 1.0;
  double tm_accuracy = 1.0;
  std::uint64_t total_cost = 0;
  std::uint64_t baseline_cost = 0;
};

std::vector<AccuracyRecord> run_accuracy_experiment(const AccuracyParams& params);

// --- polling cost under flow churn --------------------------------------------

struct ChurnParams {
  TopoParams topo;
  std::uint32_t initial_flows = 10000;
  std::uint32_t rounds = 60;
  std::uint32_t churn_max = 2000;  // per-round arrivals and expiries drawn from [0, churn_max]
  std::uint32_t recompute_interval = 5;
  VolumeRange volumes;
  std::uint32_t packet_size = 1500;
  RngSeed seed;
  bool verify_coverage = true;                 // assert every active flow stays observed
  std::vector<ChurnEvent>* trace_out = nullptr;  // optional event capture
};

struct ChurnRecord {
  std::uint32_t round = 0;
  std::uint32_t active_flows = 0;
  std::uint64_t patched_cost = 0;    // event patching, periodic recompute
  std::uint64_t recompute_cost = 0;  // twin state recomputing every round
  std::uint64_t baseline_cost = 0;   // per-flow polling of the active flows
};

// Each round draws an arrival count and an expiry count uniformly from
// [0, churn_max] (expiries capped at the active count and applied first),
// patches one state per event while a twin recomputes every round, and
// prices both plus the baseline.
std::vector<ChurnRecord> run_churn_experiment(const ChurnParams& params);

// Record conversions for the CLI emitters.
Record to_record(const CostRecord& r);
Record to_record(const SweepRecord& r);
Record to_record(const OverheadRecord& r);
Record to_record(const AccuracyRecord& r);
Record to_record(const ChurnRecord& r);

template <typename T>
std::vector<Record> to_records(const std::vector<T>& rows) {
  std::vector<Record> records;
  records.reserve(rows.size());
  for (const T& row : rows) records.push_back(to_record(row));
  return records;
}

}  // namespace flowcover
