// Serial reference vs OpenMP kernels.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "gradflow/fractional.hpp"
#include "gradflow/parallel.hpp"
#include "gradflow/sim.hpp"
#include "gradflow/special_fn.hpp"

using namespace gradflow;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void set_label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_ConvolveReversed(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(1));
  const std::vector<double> w = fractional::memory_weights(0.5, n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(1e-3 * static_cast<double>(i));
  const Execution exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::convolve_reversed(w, s, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
  set_label(state);
}
BENCHMARK(BM_ConvolveReversed)->ArgsProduct({{0, 1}, {1 << 12, 1 << 16, 1 << 20}});

void BM_SolveCaputo(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(1));
  const Execution exec = exec_of(state);
  for (auto _ : state) {
    auto th = fractional::solve_caputo(
        0.5, 0.0, [](double, double y) { return 1.0 - y; }, 1.0 / static_cast<double>(n), n, exec);
    benchmark::DoNotOptimize(th.back());
  }
  set_label(state);
}
BENCHMARK(BM_SolveCaputo)->ArgsProduct({{0, 1}, {2000, 10000}})->Unit(benchmark::kMillisecond);

void BM_FirstZero(benchmark::State& state) {
  special::ZeroSearchOptions opts;
  opts.execution = exec_of(state);
  for (auto _ : state) {
    for (double a : {1.7, 1.5, 1.3, 1.1, 1.05})
      benchmark::DoNotOptimize(
          special::ml_first_positive_zero({a, 1.0, special::ZeroKind::Standard}, opts));
  }
  set_label(state);
}
BENCHMARK(BM_FirstZero)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  const Problem p =
      quadratic_problem(reference_quadratic_matrix()).with_constants(4.30, 0.70, 2.0);
  std::vector<Vector> x0s;
  for (int i = 1; i <= 8; ++i) x0s.push_back(Vector{{-5.0 * i, 5.0 * i}});
  const auto runs = vary_initial_conditions(FlowLaw::second_order(10, 1, 1), x0s);
  SimOptions opts;
  opts.record_stride = 1000;
  opts.execution = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(sweep(p, runs, opts));
  set_label(state);
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
