#include <benchmark/benchmark.h>

#include "qcsma/coupling.hpp"
#include "qcsma/engine.hpp"
#include "qcsma/rng.hpp"
#include "qcsma/theory.hpp"
#include "qcsma/thinning.hpp"

using namespace qcsma;

namespace {

NetworkSpec reference(double r) {
  NetworkSpec s;
  s.r = r;
  s.delta = 0.05;
  return s;
}

void BM_InternalRun(benchmark::State& state) {
  const NetworkSpec s = reference(static_cast<double>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto t = simulate_run(s, ModelKind::internal(), PowerLaw{1.0, 1.0}, PowerLaw{1.0, 2.0}, ++seed);
    benchmark::DoNotOptimize(t.report.tau);
  }
}
BENCHMARK(BM_InternalRun)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_ExternalRun(benchmark::State& state) {
  const NetworkSpec s = reference(static_cast<double>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto t = simulate_run(s, ModelKind::external(), PowerLaw{1.0, 1.0}, PowerLaw{1.0, 2.0}, ++seed);
    benchmark::DoNotOptimize(t.report.tau);
  }
}
BENCHMARK(BM_ExternalRun)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_CoupledTriple(benchmark::State& state) {
  const NetworkSpec s = reference(2000.0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto run = coupled_triple(s, PowerLaw{1.0, 1.0}, PowerLaw{1.0, 2.0}, ++seed);
    benchmark::DoNotOptimize(run.tau_int);
  }
}
BENCHMARK(BM_CoupledTriple)->Unit(benchmark::kMillisecond);

void BM_ThinningIncreasing(benchmark::State& state) {
  SplitMix64 rng(7);
  auto rate = [](double t) { return t * t; };
  double t = 0.0;
  for (auto _ : state) {
    t = next_inhomogeneous_arrival(rate, t > 50.0 ? 0.0 : t, Monotonicity::Increasing, rng);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_ThinningIncreasing);

void BM_FrozenSolve(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exact_mean_hitting_time(FrozenChain(k, k, 2.0, 3.0)));
}
BENCHMARK(BM_FrozenSolve)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
