// flowcover command-line front end: seeded generators, one-shot solves, and
// the experiment scenarios, all emitting plot-ready CSV/JSONL records.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "flowcover/churn.hpp"
#include "flowcover/core.hpp"
#include "flowcover/experiments.hpp"
#include "flowcover/rng.hpp"
#include "flowcover/setcover.hpp"
#include "flowcover/simkit.hpp"
#include "flowcover/textio.hpp"

namespace {

using namespace flowcover;

const std::map<std::string, TopoKind> kKindNames{{"er", TopoKind::erdos_renyi},
                                                 {"waxman", TopoKind::waxman}};

// Default output location: $FLOWCOVER_OUT_DIR (falling back to the working
// directory) plus a per-scenario file name. An explicit --out wins verbatim.
std::string resolve_out(const std::string& explicit_out, const std::string& stem,
                        const std::string& ext) {
  if (!explicit_out.empty()) return explicit_out;
  const char* dir = std::getenv("FLOWCOVER_OUT_DIR");
  const std::filesystem::path base = (dir && *dir) ? dir : ".";
  return (base / (stem + ext)).string();
}

void emit_records(const std::string& path, const std::vector<Record>& records, bool json) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  if (json)
    write_records_jsonl(out, records);
  else
    write_records_csv(out, records);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
  return buf;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

// Config files --------------------------------------------------------------------

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t");
  return s.substr(from, to - from + 1);
}

// Replaces `--config FILE` (or `--config=FILE`) with the file's key=value
// lines, injected as `--key=value` tokens after the user's own arguments.
// Keys the command line already sets are skipped, so explicit flags win.
void expand_config(std::vector<std::string>& args) {
  std::string file;
  bool found = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw std::invalid_argument("--config: missing file path");
      file = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      found = true;
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      found = true;
      break;
    }
  }
  if (!found) return;
  for (const std::string& arg : args) {
    if (arg == "--config" || arg.rfind("--config=", 0) == 0)
      throw std::invalid_argument("--config may be given at most once");
  }

  std::set<std::string> explicit_flags;
  for (const std::string& arg : args) {
    if (arg.rfind("--", 0) == 0) explicit_flags.insert(arg.substr(0, arg.find('=')));
  }

  std::ifstream in(file);
  if (!in) throw std::invalid_argument("--config: cannot open " + file);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument(file + " line " + std::to_string(line_no) +
                                  ": expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (explicit_flags.count("--" + key)) continue;
    args.push_back("--" + key + "=" + value);
  }
}

void add_config_help(CLI::App& cmd) {
  // Parsed away before CLI11 runs; registered here so --help documents it.
  static std::string sink;
  cmd.add_option("--config", sink,
                 "Flat key=value file mirroring this subcommand's flags "
                 "(explicit flags win)");
}

// Shared flag bundles -----------------------------------------------------------

struct SeedFlag {
  std::uint64_t value = 0;
};

CLI::Option* add_seed(CLI::App& cmd, SeedFlag& seed) {
  return cmd.add_option("--seed", seed.value, "RNG seed (required: no entropy defaults)")
      ->required();
}

struct OutFlags {
  std::string out;
  bool json = false;
};

void add_record_out(CLI::App& cmd, OutFlags& flags) {
  cmd.add_option("--out", flags.out,
                 "Output path (default: $FLOWCOVER_OUT_DIR/<scenario>.<csv|jsonl>)");
  cmd.add_flag("--json", flags.json, "Emit JSONL records instead of CSV");
}

void add_topo_flags(CLI::App& cmd, TopoParams& topo) {
  cmd.add_option("--topo-kind", topo.kind, "Topology family")
      ->transform(CLI::CheckedTransformer(kKindNames, CLI::ignore_case))
      ->default_str("er");
  cmd.add_option("--n", topo.n, "Switch count")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--p", topo.er_p, "Edge probability for er (0 = 2 ln n / n)")
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--alpha", topo.waxman_alpha, "Waxman alpha")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--beta", topo.waxman_beta, "Waxman beta")->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_volume_flags(CLI::App& cmd, VolumeRange& volumes, std::uint32_t& packet_size) {
  cmd.add_option("--vol-lo", volumes.lo_bytes, "Smallest flow volume in bytes")->capture_default_str();
  cmd.add_option("--vol-hi", volumes.hi_bytes, "Largest flow volume in bytes")->capture_default_str();
  cmd.add_option("--pkt", packet_size, "Packet size in bytes")->capture_default_str()
      ->check(CLI::PositiveNumber);
}

// Subcommands ---------------------------------------------------------------------

void setup_gen_topo(CLI::App& app) {
  auto cmd = app.add_subcommand("gen-topo", "Generate a connected random topology");
  auto topo = std::make_shared<TopoParams>();
  auto seed = std::make_shared<SeedFlag>();
  auto loss_ratio = std::make_shared<double>(0.0);
  auto out = std::make_shared<std::string>();
  add_topo_flags(*cmd, *topo);
  add_seed(*cmd, *seed);
  cmd->add_option("--loss-ratio", *loss_ratio, "Fraction of switches marked lossy")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--out", *out, "Output path (default: $FLOWCOVER_OUT_DIR/topo.txt)");
  add_config_help(*cmd);
  cmd->callback([=] {
    // Stage substreams make this file identical to the topology the scenario
    // subcommands build internally from the same run seed.
    Topology t = make_topology(*topo, substream(RngSeed{seed->value}, kTopoStream));
    if (*loss_ratio > 0.0)
      t = mark_loss_switches(std::move(t), *loss_ratio,
                             substream(RngSeed{seed->value}, kLossStream));
    const std::string path = resolve_out(*out, "topo", ".txt");
    Instance inst;
    inst.topo = std::move(t);
    save_instance(path, inst);
    std::cout << "gen-topo: wrote " << path << " (" << topo_kind_name(topo->kind)
              << " n=" << inst.topo.switch_count << " links=" << inst.topo.links.size()
              << " lossy=" << inst.topo.loss_switches.size() << ")\n";
  });
}

void setup_gen_flows(CLI::App& app) {
  auto cmd = app.add_subcommand("gen-flows", "Add random flows to a topology file");
  auto topo_path = std::make_shared<std::string>();
  auto m = std::make_shared<std::uint32_t>(0);
  auto volumes = std::make_shared<VolumeRange>();
  auto packet = std::make_shared<std::uint32_t>(1500);
  auto seed = std::make_shared<SeedFlag>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--topo", *topo_path, "Instance file holding the topology")
      ->required();
  cmd->add_option("--m", *m, "Flow count")->required();
  add_volume_flags(*cmd, *volumes, *packet);
  add_seed(*cmd, *seed);
  cmd->add_option("--out", *out, "Output path (default: $FLOWCOVER_OUT_DIR/instance.txt)");
  add_config_help(*cmd);
  cmd->callback([=] {
    Instance inst = load_instance(*topo_path);
    inst.flows = gen_flows(inst.topo, *m, *volumes,
                           substream(RngSeed{seed->value}, kFlowStream), *packet);
    const std::string path = resolve_out(*out, "instance", ".txt");
    save_instance(path, inst);
    std::cout << "gen-flows: wrote " << path << " (m=" << inst.flows.size()
              << " over n=" << inst.topo.switch_count << ")\n";
  });
}

void setup_solve(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "solve", "Optimize one instance and report its cost against the baseline");
  auto topo = std::make_shared<TopoParams>();
  auto m = std::make_shared<std::uint32_t>(20000);
  auto volumes = std::make_shared<VolumeRange>();
  auto packet = std::make_shared<std::uint32_t>(1500);
  auto seed = std::make_shared<SeedFlag>();
  auto instance_path = std::make_shared<std::string>();
  auto scheme_out = std::make_shared<std::string>();
  auto model = std::make_shared<CostModel>();
  auto exact = std::make_shared<bool>(false);
  auto budget = std::make_shared<std::uint64_t>(kDefaultExactNodeBudget);
  auto flags = std::make_shared<OutFlags>();
  add_topo_flags(*cmd, *topo);
  cmd->add_option("--m", *m, "Flow count")->capture_default_str();
  add_volume_flags(*cmd, *volumes, *packet);
  auto seed_opt = cmd->add_option("--seed", seed->value,
                                  "RNG seed (required unless --instance is given)");
  auto inst_opt = cmd->add_option("--instance", *instance_path,
                                  "Solve this instance file instead of generating one");
  cmd->add_option("--scheme-out", *scheme_out, "Also write the polling scheme here");
  cmd->add_option("--l-req", model->l_req, "Request length override in bytes")->capture_default_str();
  cmd->add_option("--l-reply-header", model->l_reply_header,
                  "Reply header length override in bytes")->capture_default_str();
  cmd->add_option("--l-entry", model->l_single_flow_entry,
                  "Per-entry reply length override in bytes")->capture_default_str();
  cmd->add_flag("--exact", *exact, "Use the branch-and-bound solver (small instances)");
  cmd->add_option("--node-budget", *budget, "Node budget for --exact")->capture_default_str();
  add_record_out(*cmd, *flags);
  add_config_help(*cmd);
  cmd->callback([=, &app] {
    if (inst_opt->count() == 0 && seed_opt->count() == 0)
      throw CLI::RequiredError(app.get_name() + " solve: --seed (or --instance)");
    const Instance inst = inst_opt->count() > 0
                              ? load_instance(*instance_path)
                              : make_instance(*topo, *m, *volumes, *packet,
                                              RngSeed{seed->value});

    const WeightedSetSystem system = construct_weighted_sets(inst.topo, inst.flows, *model);
    bool proven = true;
    CoverSolution solution;
    if (*exact) {
      const ExactCoverResult result = exact_cover(system, *budget);
      solution = result.solution;
      proven = result.proven;
    } else {
      solution = greedy_cover(system);
    }
    const PollingScheme scheme = decode_scheme(system, solution, inst.flows);
    if (!scheme_out->empty()) save_scheme(*scheme_out, scheme);

    CostRecord rec;
    rec.kind = topo->kind;
    rec.n = inst.topo.switch_count;
    rec.m = static_cast<std::uint32_t>(inst.flows.size());
    rec.seed = seed->value;
    rec.flowcover_cost = scheme_cost(*model, scheme, flows_by_switch(inst.topo, inst.flows));
    rec.baseline_cost = per_flow_baseline_cost(*model, inst.flows.size());
    rec.savings = rec.baseline_cost > 0
                      ? 1.0 - static_cast<double>(rec.flowcover_cost) /
                                  static_cast<double>(rec.baseline_cost)
                      : 0.0;
    rec.poll_all_switches = static_cast<std::uint32_t>(scheme.poll_all.size());
    rec.single_polls = static_cast<std::uint32_t>(scheme.single_polls.size());

    const std::string path =
        resolve_out(flags->out, "solve", flags->json ? ".jsonl" : ".csv");
    emit_records(path, to_records(std::vector<CostRecord>{rec}), flags->json);
    std::cout << "solve: flowcover=" << rec.flowcover_cost
              << " baseline=" << rec.baseline_cost
              << " savings=" << percent(rec.savings)
              << " (pollall=" << rec.poll_all_switches
              << " singles=" << rec.single_polls
              << (*exact ? (proven ? ", exact" : ", exact budget hit") : "")
              << ") -> " << path << "\n";
  });
}

void setup_sweep(CLI::App& app) {
  auto cmd = app.add_subcommand("sweep-pollall",
                                "Price every poll-all budget from 0 to n switches");
  auto params = std::make_shared<SweepParams>();
  params->topo.n = 100;
  auto packet = std::make_shared<std::uint32_t>(1500);
  auto seed = std::make_shared<SeedFlag>();
  auto flags = std::make_shared<OutFlags>();
  add_topo_flags(*cmd, params->topo);
  cmd->add_option("--m", params->m, "Flow count")->capture_default_str();
  add_volume_flags(*cmd, params->volumes, *packet);
  add_seed(*cmd, *seed);
  add_record_out(*cmd, *flags);
  add_config_help(*cmd);
  cmd->callback([=] {
    params->packet_size = *packet;
    params->seed = RngSeed{seed->value};
    const std::vector<SweepRecord> records = run_poll_all_sweep(*params);
    std::uint64_t best_cost = records[0].total_cost;
    std::uint32_t best_k = 0;
    for (const SweepRecord& rec : records) {
      if (rec.total_cost < best_cost) {
        best_cost = rec.total_cost;
        best_k = rec.k;
      }
    }
    const std::string path =
        resolve_out(flags->out, "sweep-pollall", flags->json ? ".jsonl" : ".csv");
    emit_records(path, to_records(records), flags->json);
    std::cout << "sweep-pollall: wrote " << path << " (" << records.size()
              << " records, baseline=" << records[0].total_cost << ", min cost="
              << best_cost << " at k=" << best_k << ")\n";
  });
}

void setup_cost(CLI::App& app) {
  auto cmd = app.add_subcommand("cost", "Optimized polling cost vs the per-flow baseline");
  auto params = std::make_shared<CostExperimentParams>();
  auto packet = std::make_shared<std::uint32_t>(1500);
  auto seed = std::make_shared<SeedFlag>();
  auto flags = std::make_shared<OutFlags>();
  add_topo_flags(*cmd, params->topo);
  cmd->add_option("--m-list", params->flow_counts, "Flow counts to price")->capture_default_str()
      ->delimiter(',');
  add_volume_flags(*cmd, params->volumes, *packet);
  cmd->add_option("--trials", params->trials, "Seeds per flow count (seed, seed+1, ...)")->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_seed(*cmd, *seed);
  add_record_out(*cmd, *flags);
  add_config_help(*cmd);
  cmd->callback([=] {
    params->packet_size = *packet;
    params->seed = RngSeed{seed->value};
    const std::vector<CostRecord> records = run_cost_experiment(*params);
    double savings_sum = 0.0;
    for (const CostRecord& rec : records) savings_sum += rec.savings;
    const std::string path =
        resolve_out(flags->out, "cost", flags->json ? ".jsonl" : ".csv");
    emit_records(path, to_records(records), flags->json);
    std::cout << "cost: wrote " << path << " (" << records.size()
              << " records, mean savings="
              << percent(savings_sum / static_cast<double>(records.size())) << ")\n";
  });
}

void setup_overhead(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "overhead", "Time construction and solving across flow and switch sweeps");
  auto params = std::make_shared<OverheadParams>();
  auto seed = std::make_shared<SeedFlag>();
  auto flags = std::make_shared<OutFlags>();
  add_topo_flags(*cmd, params->topo);
  cmd->add_option("--m-list", params->flow_counts, "Flow counts for the flows sweep")->capture_default_str()
      ->delimiter(',');
  cmd->add_option("--fixed-m", params->fixed_m, "Flow count for the switches sweep")->capture_default_str();
  cmd->add_option("--n-list", params->switch_counts, "Switch counts for the switches sweep")->capture_default_str()
      ->delimiter(',');
  cmd->add_option("--reps", params->repetitions, "Repetitions per point (min is kept)")->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_seed(*cmd, *seed);
  add_record_out(*cmd, *flags);
  add_config_help(*cmd);
  cmd->callback([=] {
    params->seed = RngSeed{seed->value};
    const std::vector<OverheadRecord> records = run_overhead_experiment(*params);
    double worst = 0.0;
    for (const OverheadRecord& rec : records) worst = std::max(worst, rec.solve_seconds);
    const std::string path =
        resolve_out(flags->out, "overhead", flags->json ? ".jsonl" : ".csv");
    emit_records(path, to_records(records), flags->json);
    std::cout << "overhead: wrote " << path << " (" << records.size()
              << " records, max solve=" << fixed3(worst) << "s)\n";
  });
}

void setup_accuracy(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "accuracy", "Measurement accuracy of the optimized scheme under packet loss");
  auto params = std::make_shared<AccuracyParams>();
  auto packet = std::make_shared<std::uint32_t>(1500);
  auto seed = std::make_shared<SeedFlag>();
  auto flags = std::make_shared<OutFlags>();
  add_topo_flags(*cmd, params->topo);
  cmd->add_option("--m", params->m, "Flow count")->capture_default_str();
  cmd->add_option("--loss-rate", params->loss_rate, "Drop probability per lossy switch")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--loss-ratio", params->loss_switch_ratio,
                  "Fraction of switches that are lossy")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  add_volume_flags(*cmd, params->volumes, *packet);
  cmd->add_option("--trials", params->trials, "Seeds per setting (seed, seed+1, ...)")->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_seed(*cmd, *seed);
  add_record_out(*cmd, *flags);
  add_config_help(*cmd);
  cmd->callback([=] {
    params->packet_size = *packet;
    params->seed = RngSeed{seed->value};
    const std::vector<AccuracyRecord> records = run_accuracy_experiment(*params);
    double afr_sum = 0.0, tm_sum = 0.0;
    for (const AccuracyRecord& rec : records) {
      afr_sum += rec.afr;
      tm_sum += rec.tm_accuracy;
    }
    const auto count = static_cast<double>(records.size());
    const std::string path =
        resolve_out(flags->out, "accuracy", flags->json ? ".jsonl" : ".csv");
    emit_records(path, to_records(records), flags->json);
    std::cout << "accuracy: wrote " << path << " (" << records.size()
              << " records, mean afr=" << fixed3(afr_sum / count)
              << " mean tm=" << fixed3(tm_sum / count) << ")\n";
  });
}

void setup_churn(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "churn", "Patched vs recomputed polling cost under flow arrivals and expiries");
  auto params = std::make_shared<ChurnParams>();
  auto packet = std::make_shared<std::uint32_t>(1500);
  auto seed = std::make_shared<SeedFlag>();
  auto trace_path = std::make_shared<std::string>();
  auto flags = std::make_shared<OutFlags>();
  add_topo_flags(*cmd, params->topo);
  cmd->add_option("--initial-flows", params->initial_flows, "Flows active at round 0")->capture_default_str();
  cmd->add_option("--rounds", params->rounds, "Polling rounds to run")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--churn-max", params->churn_max,
                  "Per-round arrivals and expiries are drawn from [0, this]")->capture_default_str();
  cmd->add_option("--recompute-interval", params->recompute_interval,
                  "Rounds between full recomputes of the patched scheme")->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_volume_flags(*cmd, params->volumes, *packet);
  add_seed(*cmd, *seed);
  cmd->add_option("--trace-out", *trace_path, "Also write the arrival/expiry event trace");
  add_record_out(*cmd, *flags);
  add_config_help(*cmd);
  cmd->callback([=] {
    params->packet_size = *packet;
    params->seed = RngSeed{seed->value};
    std::vector<ChurnEvent> trace;
    if (!trace_path->empty()) params->trace_out = &trace;
    const std::vector<ChurnRecord> records = run_churn_experiment(*params);
    if (!trace_path->empty()) save_churn_trace(*trace_path, trace);
    const std::string path =
        resolve_out(flags->out, "churn", flags->json ? ".jsonl" : ".csv");
    emit_records(path, to_records(records), flags->json);
    const ChurnRecord& last = records.back();
    std::cout << "churn: wrote " << path << " (" << records.size()
              << " rounds, final active=" << last.active_flows
              << " patched=" << last.patched_cost
              << " recompute=" << last.recompute_cost << ")\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowcover: flow-statistics polling optimizer and simulation harness",
               "flowcover"};
  app.require_subcommand(1);
  setup_gen_topo(app);
  setup_gen_flows(app);
  setup_solve(app);
  setup_sweep(app);
  setup_cost(app);
  setup_overhead(app);
  setup_accuracy(app);
  setup_churn(app);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    expand_config(args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);     // prints help or the usage error
    return code == 0 ? 0 : 2;         // 2: bad flags/config
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;                         // 2: config validated but semantically invalid
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;                         // 1: generator/solver/IO failure
  }
  return 0;
}
