#include <random>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "selr/estimating_function.hpp"
#include "selr/kernel.hpp"
#include "selr/local_el.hpp"
#include "selr/simulation.hpp"

namespace {

void BM_SolveLagrange(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto d = static_cast<Eigen::Index>(state.range(1));
  std::mt19937_64 gen(1);
  std::normal_distribution<double> norm;
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) m(i, k) = norm(gen) + 0.2;
  }
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (auto _ : state) benchmark::DoNotOptimize(selr::solve_lagrange(m, w));
}
BENCHMARK(BM_SolveLagrange)->Args({50, 2})->Args({200, 4})->Args({800, 8});

void BM_FitLocal(benchmark::State& state) {
  selr::mc::SimulationConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  const selr::Dataset data = selr::mc::generate(cfg, 0);
  const selr::Kernel k(selr::KernelFamily::Triweight);
  const auto w = selr::local_weights(data, k, cfg.bandwidth(), 0.5);
  const auto g = selr::make_smoothed_indicator({0.0, 0.8, std::numeric_limits<double>::infinity()}, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(selr::fit_local(data, w, g));
}
BENCHMARK(BM_FitLocal)->Arg(200)->Arg(800)->Unit(benchmark::kMicrosecond);

}  // namespace
