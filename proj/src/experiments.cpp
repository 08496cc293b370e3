#include "flowcover/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace flowcover {

MeasurementReport measure(const Topology& topo, const CostModel& model,
                          const PollingScheme& scheme, const CounterTable& counters,
                          const std::vector<Flow>& flows) {
  if (counters.bytes.size() != flows.size())
    throw std::invalid_argument("measure: counter table does not match the flows");
  MeasurementReport report;
  report.per_flow.reserve(flows.size());
  std::uint64_t exact = 0;
  std::uint64_t abs_error_sum = 0;
  std::uint64_t real_sum = 0;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const Flow& flow = flows[i];
    const auto& row = counters.bytes[i];
    if (row.size() != flow.path.size())
      throw std::invalid_argument("measure: counter row does not match the flow path");

    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    std::size_t polled = npos;
    if (const SinglePoll* sp = scheme.single_for(flow.id)) {
      for (std::size_t j = 0; j < flow.path.size(); ++j) {
        if (flow.path[j] == sp->sw) {
          polled = j;
          break;
        }
      }
      if (polled == npos)
        throw std::invalid_argument("measure: single poll names a switch off the flow's path");
    } else {
      for (std::size_t j = 0; j < flow.path.size(); ++j) {
        if (scheme.polls_all(flow.path[j])) {
          polled = j;
          break;
        }
      }
      if (polled == npos)
        throw std::invalid_argument("measure: scheme leaves flow " +
                                    std::to_string(flow.id) + " unobserved");
    }

    FlowMeasurement fm;
    fm.flow = flow.id;
    fm.polled_switch = flow.path[polled];
    fm.measured_bytes = row[polled];
    fm.real_bytes = row.back();
    exact += fm.measured_bytes == fm.real_bytes;
    abs_error_sum += fm.measured_bytes >= fm.real_bytes ? fm.measured_bytes - fm.real_bytes
                                                        : fm.real_bytes - fm.measured_bytes;
    real_sum += fm.real_bytes;
    report.per_flow.push_back(fm);
  }
  report.afr = flows.empty() ? 1.0 : static_cast<double>(exact) / static_cast<double>(flows.size());
  report.tm_accuracy =
      real_sum > 0 ? 1.0 - static_cast<double>(abs_error_sum) / static_cast<double>(real_sum)
                   : (abs_error_sum == 0 ? 1.0 : 0.0);
  report.total_cost_bytes = scheme_cost(model, scheme, flows_by_switch(topo, flows));
  report.baseline_cost_bytes = per_flow_baseline_cost(model, flows.size());
  return report;
}

// --- record writers -----------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::logic_error("format_double: conversion failed");
  return std::string(buf, end);
}

std::string format_value(const RecordValue& value) {
  if (const auto* u = std::get_if<std::uint64_t>(&value)) return std::to_string(*u);
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&value)) return format_double(*d);
  return std::get<std::string>(value);
}

void append_json_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void check_uniform_shape(const std::vector<Record>& records) {
  for (const Record& rec : records) {
    if (rec.size() != records.front().size())
      throw std::logic_error("record batch has inconsistent fields");
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i].name != records.front()[i].name)
        throw std::logic_error("record batch has inconsistent fields");
    }
  }
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<Record>& records) {
  if (records.empty()) return;
  check_uniform_shape(records);
  std::string line;
  for (std::size_t i = 0; i < records.front().size(); ++i) {
    if (i) line += ',';
    line += records.front()[i].name;
  }
  line += '\n';
  out << line;
  for (const Record& rec : records) {
    line.clear();
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (i) line += ',';
      line += format_value(rec[i].value);
    }
    line += '\n';
    out << line;
  }
}

void write_records_jsonl(std::ostream& out, const std::vector<Record>& records) {
  check_uniform_shape(records);
  std::string line;
  for (const Record& rec : records) {
    line.clear();
    line += '{';
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (i) line += ',';
      append_json_string(line, rec[i].name);
      line += ':';
      if (const auto* s = std::get_if<std::string>(&rec[i].value))
        append_json_string(line, *s);
      else
        line += format_value(rec[i].value);
    }
    line += "}\n";
    out << line;
  }
}

// --- shared scenario plumbing ---------------------------------------------------

std::string topo_kind_name(TopoKind kind) {
  return kind == TopoKind::erdos_renyi ? "er" : "waxman";
}

double default_er_p(SwitchId n) {
  if (n < 2) return 1.0;
  return std::min(1.0, 2.0 * std::log(static_cast<double>(n)) / static_cast<double>(n));
}

Topology make_topology(const TopoParams& params, RngSeed seed) {
  if (params.kind == TopoKind::erdos_renyi) {
    const double p = params.er_p > 0.0 ? params.er_p : default_er_p(params.n);
    return gen_erdos_renyi(params.n, p, seed);
  }
  return gen_waxman(params.n, params.waxman_alpha, params.waxman_beta, seed);
}

Instance make_instance(const TopoParams& params, std::uint32_t flow_count,
                       VolumeRange volumes, std::uint32_t packet_size, RngSeed run_seed) {
  Instance instance;
  instance.topo = make_topology(params, substream(run_seed, kTopoStream));
  instance.flows = gen_flows(instance.topo, flow_count, volumes,
                             substream(run_seed, kFlowStream), packet_size);
  return instance;
}

// --- polling cost vs the per-flow baseline ---------------------------------------

std::vector<CostRecord> run_cost_experiment(const CostExperimentParams& params) {
  if (params.trials == 0) throw std::invalid_argument("run_cost_experiment: zero trials");
  if (params.flow_counts.empty())
    throw std::invalid_argument("run_cost_experiment: no flow counts");
  struct Job {
    std::uint32_t m = 0;
    std::uint64_t seed = 0;
  };
  std::vector<Job> jobs;
  for (std::uint32_t m : params.flow_counts) {
    for (std::uint32_t t = 0; t < params.trials; ++t)
      jobs.push_back({m, params.seed.value + t});
  }
  std::vector<CostRecord> records(jobs.size());
  std::string first_error;
  const auto count = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t j = 0; j < count; ++j) {
    try {
      const Job job = jobs[static_cast<std::size_t>(j)];
      const CostModel model;
      const Instance inst = make_instance(params.topo, job.m, params.volumes,
                                          params.packet_size, RngSeed{job.seed});
      const WeightedSetSystem system = construct_weighted_sets(inst.topo, inst.flows, model);
      const CoverSolution solution = greedy_cover(system);
      const PollingScheme scheme = decode_scheme(system, solution, inst.flows);

      CostRecord rec;
      rec.kind = params.topo.kind;
      rec.n = params.topo.n;
      rec.m = job.m;
      rec.seed = job.seed;
      rec.flowcover_cost = scheme_cost(model, scheme, flows_by_switch(inst.topo, inst.flows));
      rec.baseline_cost = per_flow_baseline_cost(model, job.m);
      rec.savings = rec.baseline_cost > 0
                        ? 1.0 - static_cast<double>(rec.flowcover_cost) /
                                    static_cast<double>(rec.baseline_cost)
                        : 0.0;
      rec.poll_all_switches = static_cast<std::uint32_t>(scheme.poll_all.size());
      rec.single_polls = static_cast<std::uint32_t>(scheme.single_polls.size());
      records[static_cast<std::size_t>(j)] = rec;
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (first_error.empty()) first_error = e.what();
      }
    }
  }
  if (!first_error.empty()) throw std::runtime_error(first_error);
  return records;
}

// --- cost as a function of the poll-all budget ------------------------------------

std::vector<SweepRecord> run_poll_all_sweep(const SweepParams& params) {
  const CostModel model;
  const Instance inst =
      make_instance(params.topo, params.m, params.volumes, params.packet_size, params.seed);
  const FlowsAtSwitch flows_at = flows_by_switch(inst.topo, inst.flows);
  const SwitchId n = inst.topo.switch_count;
  const std::uint64_t m = inst.flows.size();

  std::vector<FlowId> ids(inst.flows.size());
  for (std::size_t i = 0; i < inst.flows.size(); ++i) ids[i] = inst.flows[i].id;
  const auto index_of = [&ids](FlowId f) {
    return static_cast<std::size_t>(
        std::lower_bound(ids.begin(), ids.end(), f) - ids.begin());
  };

  // counts[v]: flows at v not covered by the switches picked so far.
  std::vector<std::uint64_t> counts(n);
  for (SwitchId v = 0; v < n; ++v) counts[v] = flows_at[v].size();
  std::vector<char> picked(n, 0);
  std::vector<char> covered(inst.flows.size(), 0);

  std::vector<SweepRecord> records;
  records.reserve(n + 1);
  std::uint64_t prefix_cost = 0;
  std::uint64_t covered_total = 0;
  records.push_back({0, 0, per_flow_baseline_cost(model, m)});
  for (SwitchId k = 1; k <= n; ++k) {
    SwitchId best = n;
    for (SwitchId v = 0; v < n; ++v) {
      if (!picked[v] && (best == n || counts[v] > counts[best])) best = v;
    }
    picked[best] = 1;
    prefix_cost += model.l_req + reply_length(model, flows_at[best].size());
    covered_total += counts[best];
    for (FlowId f : flows_at[best]) {
      const std::size_t fi = index_of(f);
      if (covered[fi]) continue;
      covered[fi] = 1;
      for (SwitchId w : inst.flows[fi].path) --counts[w];
    }
    const std::uint64_t singles = m - covered_total;
    records.push_back({k, covered_total,
                       prefix_cost + (model.l_req + reply_length(model, 1)) * singles});
  }
  return records;
}

// --- optimizer overhead ------------------------------------------------------------

namespace {

OverheadRecord time_solve_point(std::string sweep, const TopoParams& topo_params,
                                std::uint32_t m, const OverheadParams& params,
                                RngSeed run_seed) {
  using clock = std::chrono::steady_clock;
  const CostModel model;
  const Instance inst =
      make_instance(topo_params, m, params.volumes, params.packet_size, run_seed);
  OverheadRecord rec;
  rec.sweep = std::move(sweep);
  rec.n = topo_params.n;
  rec.m = m;
  rec.construct_seconds = std::numeric_limits<double>::infinity();
  rec.solve_seconds = std::numeric_limits<double>::infinity();
  for (std::uint32_t rep = 0; rep < std::max(1u, params.repetitions); ++rep) {
    const auto t0 = clock::now();
    const WeightedSetSystem system = construct_weighted_sets(inst.topo, inst.flows, model);
    const auto t1 = clock::now();
    const CoverSolution solution = greedy_cover(system);
    const auto t2 = clock::now();
    if (solution.total_weight == 0 && !inst.flows.empty())
      throw std::logic_error("overhead: greedy returned an empty cover");
    rec.construct_seconds =
        std::min(rec.construct_seconds, std::chrono::duration<double>(t1 - t0).count());
    rec.solve_seconds =
        std::min(rec.solve_seconds, std::chrono::duration<double>(t2 - t0).count());
  }
  return rec;
}

}  // namespace

std::vector<OverheadRecord> run_overhead_experiment(const OverheadParams& params) {
  std::vector<OverheadRecord> records;
  const RngSeed flows_base = substream(params.seed, 0);
  for (std::size_t i = 0; i < params.flow_counts.size(); ++i) {
    records.push_back(time_solve_point("flows", params.topo, params.flow_counts[i], params,
                                       substream(flows_base, i)));
  }
  const RngSeed switches_base = substream(params.seed, 1);
  for (std::size_t j = 0; j < params.switch_counts.size(); ++j) {
    TopoParams tp = params.topo;
    tp.n = params.switch_counts[j];
    records.push_back(
        time_solve_point("switches", tp, params.fixed_m, params, substream(switches_base, j)));
  }
  return records;
}

// --- measurement accuracy under loss -------------------------------------------------

std::vector<AccuracyRecord> run_accuracy_experiment(const AccuracyParams& params) {
  if (params.trials == 0) throw std::invalid_argument("run_accuracy_experiment: zero trials");
  std::vector<AccuracyRecord> records(params.trials);
  std::string first_error;
  const auto count = static_cast<std::int64_t>(params.trials);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < count; ++t) {
    try {
      const RngSeed run_seed{params.seed.value + static_cast<std::uint64_t>(t)};
      const CostModel model;
      Instance inst = make_instance(params.topo, params.m, params.volumes,
                                    params.packet_size, run_seed);
      inst.topo = mark_loss_switches(std::move(inst.topo), params.loss_switch_ratio,
                                     substream(run_seed, kLossStream));
      const WeightedSetSystem system = construct_weighted_sets(inst.topo, inst.flows, model);
      const PollingScheme scheme = decode_scheme(system, greedy_cover(system), inst.flows);
      const CounterTable counters = simulate_counters(inst.topo, inst.flows, params.loss_rate,
                                                      substream(run_seed, kCounterStream));
      const MeasurementReport report = measure(inst.topo, model, scheme, counters, inst.flows);

      AccuracyRecord rec;
      rec.seed = run_seed.value;
      rec.m = params.m;
      rec.loss_rate = params.loss_rate;
      rec.loss_switch_ratio = params.loss_switch_ratio;
      rec.afr = report.afr;
      rec.tm_accuracy = report.tm_accuracy;
      rec.total_cost = report.total_cost_bytes;
      rec.baseline_cost = report.baseline_cost_bytes;
      records[static_cast<std::size_t>(t)] = rec;
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (first_error.empty()) first_error = e.what();
      }
    }
  }
  if (!first_error.empty()) throw std::runtime_error(first_error);
  return records;
}

// --- polling cost under flow churn ----------------------------------------------------

std::vector<ChurnRecord> run_churn_experiment(const ChurnParams& params) {
  const CostModel model;
  const Instance inst = make_instance(params.topo, params.initial_flows, params.volumes,
                                      params.packet_size, params.seed);
  ChurnState patched =
      make_churn_state(inst.topo, inst.flows, model, params.recompute_interval);
  ChurnState twin = make_churn_state(inst.topo, inst.flows, model, 1);

  FlowFactory factory(inst.topo, params.volumes, params.packet_size);
  SplitMix64 events(substream(params.seed, kChurnStream));
  FlowId next_id = params.initial_flows;

  std::vector<ChurnRecord> records;
  records.reserve(params.rounds);
  for (std::uint32_t round = 1; round <= params.rounds; ++round) {
    const auto arrivals = events.next_below(params.churn_max + 1);
    const auto expiry_draw = events.next_below(params.churn_max + 1);
    const auto expiries =
        std::min<std::uint64_t>(expiry_draw, patched.active_flows.size());

    if (expiries > 0) {
      std::vector<FlowId> ids;
      ids.reserve(patched.active_flows.size());
      for (const auto& [id, flow] : patched.active_flows) ids.push_back(id);
      for (std::uint64_t i = 0; i < expiries; ++i)
        std::swap(ids[i], ids[i + events.next_below(ids.size() - i)]);
      for (std::uint64_t i = 0; i < expiries; ++i) {
        ChurnEvent event;
        event.round = round;
        event.kind = ChurnEvent::Kind::expire;
        event.flow.id = ids[i];
        patched = apply_event(std::move(patched), event);
        twin = apply_event(std::move(twin), event);
        if (params.trace_out) params.trace_out->push_back(std::move(event));
      }
    }
    for (std::uint64_t i = 0; i < arrivals; ++i) {
      ChurnEvent event;
      event.round = round;
      event.kind = ChurnEvent::Kind::arrive;
      event.flow = factory.make(next_id++, events);
      patched = apply_event(std::move(patched), event);
      twin = apply_event(std::move(twin), event);
      if (params.trace_out) params.trace_out->push_back(std::move(event));
    }

    patched = maybe_recompute(std::move(patched), inst.topo, model);
    twin = maybe_recompute(std::move(twin), inst.topo, model);

    if (params.verify_coverage) {
      for (const auto& [id, flow] : patched.active_flows) {
        if (!covers(patched.scheme, flow))
          throw std::logic_error("run_churn_experiment: active flow " + std::to_string(id) +
                                 " lost coverage");
      }
    }

    ChurnRecord rec;
    rec.round = round;
    rec.active_flows = static_cast<std::uint32_t>(patched.active_flows.size());
    rec.patched_cost = active_scheme_cost(patched, inst.topo, model);
    rec.recompute_cost = active_scheme_cost(twin, inst.topo, model);
    rec.baseline_cost = per_flow_baseline_cost(model, patched.active_flows.size());
    records.push_back(rec);
  }
  return records;
}

// --- record conversions -----------------------------------------------------------------

Record to_record(const CostRecord& r) {
  return {{"kind", topo_kind_name(r.kind)},
          {"n", static_cast<std::uint64_t>(r.n)},
          {"m", static_cast<std::uint64_t>(r.m)},
          {"seed", r.seed},
          {"flowcover_cost", r.flowcover_cost},
          {"baseline_cost", r.baseline_cost},
          {"savings", r.savings},
          {"poll_all_switches", static_cast<std::uint64_t>(r.poll_all_switches)},
          {"single_polls", static_cast<std::uint64_t>(r.single_polls)}};
}

Record to_record(const SweepRecord& r) {
  return {{"k", static_cast<std::uint64_t>(r.k)},
          {"covered", r.covered},
          {"total_cost", r.total_cost}};
}

Record to_record(const OverheadRecord& r) {
  return {{"sweep", r.sweep},
          {"n", static_cast<std::uint64_t>(r.n)},
          {"m", static_cast<std::uint64_t>(r.m)},
          {"construct_seconds", r.construct_seconds},
          {"solve_seconds", r.solve_seconds}};
}

Record to_record(const AccuracyRecord& r) {
  return {{"seed", r.seed},
          {"m", static_cast<std::uint64_t>(r.m)},
          {"loss_rate", r.loss_rate},
          {"loss_switch_ratio", r.loss_switch_ratio},
          {"afr", r.afr},
          {"tm_accuracy", r.tm_accuracy},
          {"total_cost", r.total_cost},
          {"baseline_cost", r.baseline_cost}};
}

Record to_record(const ChurnRecord& r) {
  return {{"round", static_cast<std::uint64_t>(r.round)},
          {"active_flows", static_cast<std::uint64_t>(r.active_flows)},
          {"patched_cost", r.patched_cost},
          {"recompute_cost", r.recompute_cost},
          {"baseline_cost", r.baseline_cost}};
}

}  // namespace flowcover
