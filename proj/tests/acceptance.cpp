// Acceptance suite: one test case per release criterion, each printing a
// single [PASS]/[FAIL] line with the measured values. Run via `ctest -R
// acceptance` or directly; the binary fails if any criterion fails.
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "flowcover/churn.hpp"
#include "flowcover/core.hpp"
#include "flowcover/experiments.hpp"
#include "flowcover/rng.hpp"
#include "flowcover/setcover.hpp"
#include "flowcover/simkit.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace flowcover;
using namespace flowcover::testing;

namespace {

void report(bool ok, const std::string& name, const std::string& details) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), details.c_str());
  std::fflush(stdout);
  const std::string message = name + " — " + details;
  CHECK_MESSAGE(ok, message);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Coefficient of determination of the least-squares line through (x, y).
double r_squared(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double mx = mean(xs), my = mean(ys);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double b = sxy / sxx;
  const double a = my - b * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ss_res += (ys[i] - (a + b * xs[i])) * (ys[i] - (a + b * xs[i]));
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  return 1.0 - ss_res / ss_tot;
}

std::vector<double> ranks(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] < xs[b];
  });
  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {  // average ranks across ties
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  return rank;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::vector<double> rx = ranks(xs), ry = ranks(ys);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FLOWCOVER_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "flowcover-acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("acceptance: cost-model identities") {
  const CostModel model;
  const std::uint64_t reply1 = reply_length(model, 1);
  const std::uint64_t base6 = per_flow_baseline_cost(model, 6);
  const bool ok = reply1 == 174 && base6 == 1776;
  report(ok, "cost-model identities",
         fmt("reply_length(1)=%llu (want 174), per_flow_baseline_cost(6)=%llu (want 1776)",
             static_cast<unsigned long long>(reply1),
             static_cast<unsigned long long>(base6)));
}

TEST_CASE("acceptance: pinned-example optimum") {
  const Instance inst = worked_example_instance();
  const CostModel canonical;
  const WeightedSetSystem system =
      construct_weighted_sets(inst.topo, inst.flows, canonical);
  const ExactCoverResult exact = exact_cover(system);
  const PollingScheme scheme = decode_scheme(system, exact.solution, inst.flows);

  const auto enumerated = enumerate_cover(system);
  const bool enum_ok = enumerated.has_value() && enumerated->weight == 1072 &&
                       enumerated->optimal_subsets == 1;

  // The same instance under an 88-byte reply header totals 1092 instead of
  // 1072; both totals are pinned so the header-constant choice stays visible
  // rather than hidden.
  const CostModel published_header{122, 88, 96};
  const ExactCoverResult alt =
      exact_cover(construct_weighted_sets(inst.topo, inst.flows, published_header));

  const bool ok = exact.proven && exact.solution.total_weight == 1072 &&
                  scheme.poll_all == std::vector<SwitchId>{2, 5} &&
                  scheme.single_polls.empty() && enum_ok &&
                  alt.solution.total_weight == 1092;
  report(ok, "pinned-example optimum",
         fmt("exact cover weight=%llu proven=%d poll-all={%s} (want {2,5} at 1072, "
             "enumeration-unique=%d); 88-byte-header variant=%llu (want 1092)",
             static_cast<unsigned long long>(exact.solution.total_weight),
             exact.proven ? 1 : 0,
             [&] {
               std::string s;
               for (SwitchId v : scheme.poll_all) s += (s.empty() ? "" : ",") + std::to_string(v);
               return s;
             }().c_str(),
             enum_ok ? 1 : 0,
             static_cast<unsigned long long>(alt.solution.total_weight)));
}

TEST_CASE("acceptance: greedy approximation bound") {
  SplitMix64 rng(RngSeed{20250819});
  const CostModel model;
  int violations = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Instance inst = random_small_instance(rng, 2, 12, 15);
    const WeightedSetSystem system = construct_weighted_sets(inst.topo, inst.flows, model);
    const CoverSolution greedy = greedy_cover(system);
    const ExactCoverResult exact = exact_cover(system);
    if (!exact.proven) {
      ++violations;  // budget exhaustion would make the bound unverifiable
      continue;
    }
    const double hk = harmonic(max_set_size(system));
    const double bound = hk * static_cast<double>(exact.solution.total_weight);
    const double ratio = exact.solution.total_weight == 0
                             ? 1.0
                             : static_cast<double>(greedy.total_weight) /
                                   static_cast<double>(exact.solution.total_weight);
    worst_ratio = std::max(worst_ratio, ratio);
    if (static_cast<double>(greedy.total_weight) > bound * (1.0 + 1e-12)) ++violations;
  }
  report(violations == 0, "greedy approximation bound",
         fmt("500 instances (n<=12, m<=15): %d violations of greedy <= H_k * optimum; "
             "worst greedy/optimum ratio %.4f",
             violations, worst_ratio));
}

TEST_CASE("acceptance: savings band") {
  bool ok = true;
  std::string details;
  for (TopoKind kind : {TopoKind::erdos_renyi, TopoKind::waxman}) {
    CostExperimentParams params;
    params.topo.kind = kind;
    params.topo.n = 200;
    params.flow_counts = {1000, 20000, 100000};
    params.trials = 20;
    params.seed = RngSeed{1};
    const std::vector<CostRecord> records = run_cost_experiment(params);
    for (std::size_t mi = 0; mi < params.flow_counts.size(); ++mi) {
      std::vector<double> savings;
      for (std::uint32_t t = 0; t < params.trials; ++t)
        savings.push_back(records[mi * params.trials + t].savings);
      const double avg = mean(savings);
      if (!(avg >= 0.40 && avg <= 0.55)) ok = false;
      details += fmt("%s%s/m=%u: %.3f", details.empty() ? "" : ", ",
                     topo_kind_name(kind).c_str(), params.flow_counts[mi], avg);
    }
  }
  report(ok, "savings band", "mean savings (20 seeds each, want [0.40, 0.55]) " + details);
}

TEST_CASE("acceptance: poll-all sweep shape") {
  SweepParams params;
  params.topo.n = 100;
  params.m = 20000;
  params.seed = RngSeed{1};
  const std::vector<SweepRecord> records = run_poll_all_sweep(params);
  const std::uint64_t baseline = per_flow_baseline_cost(CostModel{}, params.m);
  std::uint32_t best_k = 0;
  std::uint64_t best_cost = records[0].total_cost;
  for (const SweepRecord& rec : records) {
    if (rec.total_cost < best_cost) {
      best_cost = rec.total_cost;
      best_k = rec.k;
    }
  }
  const bool ok = records.size() == 101 && records[0].total_cost == baseline &&
                  best_cost < baseline && best_k > 0 && best_k < 100;
  report(ok, "poll-all sweep shape",
         fmt("cost(k=0)=%llu (baseline %llu), min cost=%llu at k=%u (want interior "
             "minimum strictly below baseline)",
             static_cast<unsigned long long>(records[0].total_cost),
             static_cast<unsigned long long>(baseline),
             static_cast<unsigned long long>(best_cost), best_k));
}

TEST_CASE("acceptance: solver overhead") {
  OverheadParams params;  // defaults: m in {10k..100k} at n=200; n in {50..400} at m=20k
  params.seed = RngSeed{1};
  const std::vector<OverheadRecord> records = run_overhead_experiment(params);

  std::vector<double> ms, solve_times, switch_times;
  double solve_100k = -1.0;
  for (const OverheadRecord& rec : records) {
    if (rec.sweep == "flows") {
      ms.push_back(static_cast<double>(rec.m));
      solve_times.push_back(rec.solve_seconds);
      if (rec.m == 100000) solve_100k = rec.solve_seconds;
    } else {
      switch_times.push_back(rec.solve_seconds);
    }
  }
  const double r2 = r_squared(ms, solve_times);
  const double variation = *std::max_element(switch_times.begin(), switch_times.end()) /
                           *std::min_element(switch_times.begin(), switch_times.end());
  const bool ok = solve_100k >= 0.0 && solve_100k < 2.5 && r2 > 0.95 && variation < 2.0;
  report(ok, "solver overhead",
         fmt("solve at n=200 m=100000: %.3fs (< 2.5s); linear fit over m: R²=%.4f "
             "(> 0.95); variation over n at m=20000: %.2fx (< 2x)",
             solve_100k, r2, variation));
}

TEST_CASE("acceptance: accuracy bands") {
  AccuracyParams params;
  params.topo.n = 200;
  params.m = 20000;
  params.loss_rate = 0.01;
  params.loss_switch_ratio = 0.10;
  params.trials = 20;
  params.seed = RngSeed{1};
  const std::vector<AccuracyRecord> records = run_accuracy_experiment(params);
  std::vector<double> afrs, tms;
  for (const AccuracyRecord& rec : records) {
    afrs.push_back(rec.afr);
    tms.push_back(rec.tm_accuracy);
  }
  const double afr = mean(afrs);
  const double tm = mean(tms);

  // Loss-switch-ratio sweep 0..50%: per-ratio mean AFR must fall in trend.
  std::vector<double> ratios{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> ratio_means;
  for (double ratio : ratios) {
    AccuracyParams sweep = params;
    sweep.loss_switch_ratio = ratio;
    sweep.trials = 5;
    sweep.seed = RngSeed{7};
    const std::vector<AccuracyRecord> recs = run_accuracy_experiment(sweep);
    std::vector<double> vals;
    for (const AccuracyRecord& rec : recs) vals.push_back(rec.afr);
    ratio_means.push_back(mean(vals));
  }
  const double rho = spearman(ratios, ratio_means);

  const bool ok = afr >= 0.80 && afr <= 0.97 && tm > 0.98 && rho < -0.9;
  report(ok, "accuracy bands",
         fmt("mean AFR=%.4f (want [0.80, 0.97]), mean tm=%.4f (want > 0.98), "
             "Spearman rho over loss-ratio sweep=%.3f (want < -0.9)",
             afr, tm, rho));
}

TEST_CASE("acceptance: churn coverage and cost") {
  bool covered = true;
  bool baseline_exact = true;
  double worst_ratio = 0.0;
  std::string error;
  for (std::uint64_t seed = 1; seed <= 20 && error.empty(); ++seed) {
    ChurnParams params;
    params.topo.n = 200;
    params.initial_flows = 10000;
    params.rounds = 60;
    params.churn_max = 2000;
    params.recompute_interval = 5;
    params.seed = RngSeed{seed};
    params.verify_coverage = true;  // throws if any active flow goes unobserved
    try {
      const std::vector<ChurnRecord> records = run_churn_experiment(params);
      for (const ChurnRecord& rec : records) {
        if (rec.baseline_cost != 296ull * rec.active_flows) baseline_exact = false;
        const double ratio = static_cast<double>(rec.patched_cost) /
                             static_cast<double>(rec.recompute_cost);
        worst_ratio = std::max(worst_ratio, ratio);
      }
    } catch (const std::exception& e) {
      covered = false;
      error = e.what();
    }
  }
  const bool ok = covered && baseline_exact && worst_ratio <= 1.25;
  report(ok, "churn coverage and cost",
         fmt("20 seeds x 60 rounds: coverage %s%s%s, worst patched/recompute=%.4f "
             "(<= 1.25), baseline column %s 296 x active",
             covered ? "held" : "BROKEN", error.empty() ? "" : " — ", error.c_str(),
             worst_ratio, baseline_exact ? "==" : "!="));
}

TEST_CASE("acceptance: determinism") {
  const fs::path dir = workdir();
  const std::string topo = (dir / "topo.txt").string();
  bool ok = true;
  std::string failed;

  // Each subcommand runs twice with identical arguments; outputs must match
  // byte for byte. The overhead records carry wall-clock fields, so for that
  // subcommand the non-timing columns are compared instead.
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"gen-topo", "gen-topo --topo-kind waxman --n 30 --alpha 0.9 --beta 0.5 "
                   "--loss-ratio 0.2 --seed 5 --out "},
      {"gen-flows", "gen-flows --topo " + topo + " --m 40 --seed 5 --out "},
      {"solve", "solve --topo-kind er --n 20 --m 50 --seed 5 --out "},
      {"sweep-pollall", "sweep-pollall --n 15 --m 40 --seed 5 --out "},
      {"cost", "cost --n 16 --m-list 10,30 --trials 2 --seed 5 --out "},
      {"accuracy", "accuracy --n 20 --m 40 --trials 2 --seed 5 --out "},
      {"churn", "churn --n 16 --initial-flows 25 --rounds 5 --churn-max 5 --seed 5 --out "},
      {"overhead", "overhead --n 12 --m-list 30,60 --fixed-m 40 --n-list 10,12 --reps 1 "
                   "--seed 5 --out "},
  };
  if (run_cli("gen-topo --topo-kind er --n 20 --seed 5 --out " + topo) != 0) {
    ok = false;
    failed = "seed topology for gen-flows";
  }
  for (const auto& [name, args] : cases) {
    if (!ok) break;
    const fs::path a = dir / (name + "-a.out");
    const fs::path b = dir / (name + "-b.out");
    if (run_cli(args + a.string()) != 0 || run_cli(args + b.string()) != 0) {
      ok = false;
      failed = name + " (nonzero exit)";
      break;
    }
    std::string ta = slurp(a), tb = slurp(b);
    if (name == "overhead") {  // blank the two timing columns
      const auto strip = [](const std::string& text) {
        std::istringstream in(text);
        std::string line, kept;
        while (std::getline(in, line)) {
          std::size_t cut = line.size();
          for (int commas = 0; cut > 0; --cut) {
            if (line[cut - 1] == ',' && ++commas == 2) break;
          }
          kept += line.substr(0, cut) + "\n";
        }
        return kept;
      };
      ta = strip(ta);
      tb = strip(tb);
    }
    if (ta != tb) {
      ok = false;
      failed = name + " (outputs differ)";
      break;
    }
  }
  report(ok, "determinism",
         ok ? "all 8 subcommands re-ran byte-identically (overhead compared on its "
              "non-timing columns)"
            : "first failure: " + failed);
}
