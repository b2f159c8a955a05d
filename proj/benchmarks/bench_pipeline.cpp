#include <benchmark/benchmark.h>

#include "selr/estimating_function.hpp"
#include "selr/kernel.hpp"
#include "selr/selr.hpp"
#include "selr/simulation.hpp"

namespace {

void BM_SelrSimple(benchmark::State& state) {
  selr::mc::SimulationConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  const selr::Dataset data = selr::mc::generate(cfg, 0);
  const selr::Kernel k(selr::KernelFamily::Triweight);
  selr::HypothesisSpec spec;
  spec.kind = selr::HypothesisKind::SimpleNull;
  selr::SelrOptions opt;
  opt.threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        selr::selr_simple(data, k, cfg.bandwidth(), selr::make_identity(), spec, opt));
  }
}
BENCHMARK(BM_SelrSimple)->Args({200, 1})->Args({800, 1})->Args({800, 4})
    ->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_NullStatistic(benchmark::State& state) {
  selr::mc::SimulationConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  const selr::Kernel k(selr::KernelFamily::Triweight);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const selr::Dataset data = selr::mc::generate(cfg, rep++);
    benchmark::DoNotOptimize(selr::mc::selr_null_stat(data, k, cfg.bandwidth()));
  }
}
BENCHMARK(BM_NullStatistic)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_FType(benchmark::State& state) {
  selr::mc::SimulationConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  const selr::Dataset data = selr::mc::generate(cfg, 0);
  const selr::Kernel k(selr::KernelFamily::Triweight);
  for (auto _ : state) benchmark::DoNotOptimize(selr::mc::f_type_stat(data, k, cfg.bandwidth()));
}
BENCHMARK(BM_FType)->Arg(200)->Arg(800)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
