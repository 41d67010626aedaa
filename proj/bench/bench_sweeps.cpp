// Serial reference loops against the OpenMP kernels. On a single core the
// two should be within noise of each other.

#include <benchmark/benchmark.h>

#include "fwb/catalog.hpp"
#include "fwb/fraisse.hpp"
#include "fwb/sweep.hpp"
#include "fwb/verify.hpp"

using namespace fwb;

static void BM_MachineSweep(benchmark::State& state) {
  const Exec exec = state.range(1) ? Exec::parallel : Exec::serial;
  const int size = static_cast<int>(state.range(0));
  long machines = 0;
  for (auto _ : state) {
    MachineSweep s = machine_abelian_sweep(size, exec);
    machines = s.machines;
    benchmark::DoNotOptimize(s.non_abelian);
  }
  state.counters["machines"] = static_cast<double>(machines);
  state.SetLabel(exec == Exec::parallel ? "parallel" : "serial");
}
BENCHMARK(BM_MachineSweep)->Args({5, 0})->Args({5, 1})->Args({6, 0})->Args({6, 1})->Unit(benchmark::kMillisecond);

// Amalgamation battery with the pool capped at one worker versus the default.
static void BM_AmalgamationBattery(benchmark::State& state) {
  ClassPtr c = class_by_name("div:lo");
  members(*c, 6);  // warm the member cache outside the timed loop
  set_max_jobs(state.range(0) ? 0 : 1);
  for (auto _ : state) benchmark::DoNotOptimize(check_amalgamation(*c, 3).cases);
  set_max_jobs(0);
  state.SetLabel(state.range(0) ? "parallel" : "one worker");
}
BENCHMARK(BM_AmalgamationBattery)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_LimitLo(benchmark::State& state) {
  ClassPtr c = class_linear_orders();
  for (auto _ : state) benchmark::DoNotOptimize(build_limit(*c, static_cast<int>(state.range(0)), 2).top.size());
}
BENCHMARK(BM_LimitLo)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
