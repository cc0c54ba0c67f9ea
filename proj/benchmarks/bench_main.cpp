#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "incdist/report.hpp"
#include "incdist/synth.hpp"

namespace {

using namespace incdist;

const Polynomial kFrance = Polynomial::quadratic(1.196e-7, -0.008721, 167.5);

void BM_FitQuadratic(benchmark::State& state) {
  const auto cdf = build_cdf(reconstruct_series_from_fit(kFrance, {}));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_polynomial(cdf, FitConfig{}));
  }
}
BENCHMARK(BM_FitQuadratic);

void BM_FitByDegree(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  std::vector<double> xs, ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(1e8 * (1.0 + i));
    ys.push_back(100.0 - 10.0 * i);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_least_squares(xs, ys, degree));
  }
}
BENCHMARK(BM_FitByDegree)->DenseRange(1, 5);

void BM_InvertQuadratic(benchmark::State& state) {
  double p = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_decreasing_quadratic(kFrance, p));
    p = p >= 100.0 ? 10.0 : p + 0.5;
  }
}
BENCHMARK(BM_InvertQuadratic);

void BM_RoundtripFixtureTable(benchmark::State& state) {
  const auto rows = parse_fixture_csv(embedded_fixture_csv());
  for (auto _ : state) {
    int passed = 0;
    for (const auto& row : rows) {
      try {
        passed += roundtrip_check(row.poly(), 1e-6).pass;
      } catch (const std::exception&) {
      }
    }
    benchmark::DoNotOptimize(passed);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rows.size()));
}
BENCHMARK(BM_RoundtripFixtureTable)->Unit(benchmark::kMicrosecond);

void BM_SampleIncomes(benchmark::State& state) {
  const SampleSpec spec{static_cast<std::uint64_t>(state.range(0)), 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_incomes(kFrance, spec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleIncomes)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_DecilesAndGini(benchmark::State& state) {
  const auto xs = sample_incomes(kFrance, {static_cast<std::uint64_t>(state.range(0)), 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_deciles(xs, {}));
    benchmark::DoNotOptimize(gini(xs));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DecilesAndGini)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
