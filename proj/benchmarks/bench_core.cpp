#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "bbspline/estimator.hpp"
#include "bbspline/quantizer.hpp"
#include "bbspline/rng.hpp"
#include "bbspline/simulation.hpp"
#include "bbspline/spectral.hpp"

namespace {

using namespace bbspline;

std::vector<double> noise(int n) {
  auto s = rng_stream(99, 0);
  std::vector<double> v(n);
  for (double& x : v) x = s.normal();
  return v;
}

void BM_Eigenvalues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues_from_series(n, 2));
}
BENCHMARK(BM_Eigenvalues)->Arg(128)->Arg(1024)->Arg(8192);

void BM_Fit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto eig = std::make_shared<const CirculantEigenvalues>(eigenvalues_from_series(n, 2));
  const auto y = noise(n);
  for (auto _ : state) benchmark::DoNotOptimize(fit(eig, y, 1e-5));
}
BENCHMARK(BM_Fit)->Arg(128)->Arg(1024)->Arg(8192);

void BM_GcvSelect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto eig = eigenvalues_from_series(n, 2);
  const auto y = noise(n);
  const auto grid = default_lambda_grid();
  for (auto _ : state) benchmark::DoNotOptimize(gcv_select(eig, y, grid));
}
BENCHMARK(BM_GcvSelect)->Arg(128)->Arg(1024)->Arg(8192);

void BM_QuadraticForm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpectralQuantities sq(eigenvalues_from_series(n, 2), 1e-5);
  const auto z = noise(n);
  for (auto _ : state) benchmark::DoNotOptimize(quadratic_form(sq, z));
}
BENCHMARK(BM_QuadraticForm)->Arg(128)->Arg(1024)->Arg(8192);

void BM_Quantize(benchmark::State& state) {
  const auto y = noise(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(data_range_quantizer(y, 5, MarkRule::kEmpiricalOptimal).apply(y));
  }
}
BENCHMARK(BM_Quantize)->Arg(1024)->Arg(8192);

void BM_SizeCell(benchmark::State& state) {
  auto c = ExperimentConfig::defaults_for(Scenario::kSize);
  c.n_list = {static_cast<int>(state.range(0))};
  c.b_list = {5};
  c.replications = 50;
  c.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_test_cell(c, c.n_list[0], 0.0));
}
BENCHMARK(BM_SizeCell)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
