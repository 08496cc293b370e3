// Benchmark for the OpenMP-parallel counter simulation against its serial
// reference, plus construction/greedy timings for context. The parallel and
// serial tables must match bit for bit; a mismatch fails the run.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "flowcover/core.hpp"
#include "flowcover/experiments.hpp"
#include "flowcover/rng.hpp"
#include "flowcover/setcover.hpp"
#include "flowcover/simkit.hpp"

namespace {

using namespace flowcover;
using clock_type = std::chrono::steady_clock;

template <typename Fn>
double best_seconds(std::uint32_t reps, Fn&& fn) {
  double best = 0.0;
  for (std::uint32_t r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    fn();
    const std::chrono::duration<double> dt = clock_type::now() - t0;
    if (r == 0 || dt.count() < best) best = dt.count();
  }
  return best;
}

void print_time(const std::string& label, double seconds) {
  std::printf("%-28s best %8.4fs\n", label.c_str(), seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Timing for the parallel simulation kernel vs its serial reference",
               "flowcover-bench"};
  SwitchId n = 200;
  std::uint32_t m = 50000;
  double loss_ratio = 0.10;
  double loss_rate = 0.01;
  std::uint32_t reps = 5;
  std::uint64_t seed = 1;
  app.add_option("--n", n, "Switch count")->capture_default_str();
  app.add_option("--m", m, "Flow count")->capture_default_str();
  app.add_option("--loss-ratio", loss_ratio, "Fraction of lossy switches")
      ->capture_default_str();
  app.add_option("--loss-rate", loss_rate, "Drop probability per lossy switch")
      ->capture_default_str();
  app.add_option("--reps", reps, "Repetitions (best time is kept)")
      ->capture_default_str();
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    TopoParams params;
    params.n = n;
    Instance inst = make_instance(params, m, {}, 1500, RngSeed{seed});
    inst.topo = mark_loss_switches(std::move(inst.topo), loss_ratio,
                                   substream(RngSeed{seed}, kLossStream));
    std::printf("instance: er n=%u m=%zu links=%zu lossy=%zu\n", inst.topo.switch_count,
                inst.flows.size(), inst.topo.links.size(),
                inst.topo.loss_switches.size());
#ifdef _OPENMP
    std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled in this build\n");
#endif

    const RngSeed counter_seed = substream(RngSeed{seed}, kCounterStream);
    CounterTable serial, parallel;
    const double t_serial = best_seconds(
        reps, [&] { serial = simulate_counters_serial(inst.topo, inst.flows,
                                                      loss_rate, counter_seed); });
    const double t_parallel = best_seconds(
        reps, [&] { parallel = simulate_counters(inst.topo, inst.flows,
                                                 loss_rate, counter_seed); });
    if (serial.bytes != parallel.bytes) {
      std::fprintf(stderr, "FAIL: parallel counter table differs from the serial one\n");
      return 1;
    }
    print_time("simulate_counters (serial)", t_serial);
    print_time("simulate_counters (openmp)", t_parallel);
    std::printf("%-28s %8.2fx (tables identical)\n", "speedup",
                t_parallel > 0.0 ? t_serial / t_parallel : 0.0);

    WeightedSetSystem system;
    const double t_construct = best_seconds(
        reps, [&] { system = construct_weighted_sets(inst.topo, inst.flows, CostModel{}); });
    CoverSolution solution;
    const double t_greedy = best_seconds(reps, [&] { solution = greedy_cover(system); });
    print_time("construct_weighted_sets", t_construct);
    print_time("greedy_cover", t_greedy);
    std::printf("greedy picked %zu sets, total weight %llu\n", solution.chosen.size(),
                static_cast<unsigned long long>(solution.total_weight));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
