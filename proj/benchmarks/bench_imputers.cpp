#include "featimp/imputers.hpp"
#include "featimp/missingness.hpp"
#include "featimp/pca.hpp"
#include "featimp/stats.hpp"
#include "featimp/synth.hpp"

#include <benchmark/benchmark.h>

using namespace featimp;

namespace {

/// Masked default analog with `rows` rows (driver column dropped).
DataMatrix masked_analog(std::size_t rows) {
  auto spec = default_clinic_analog();
  spec.rows = rows;
  const auto data = generate(spec);
  MissingnessSpec miss;
  miss.driver = "MMSE";
  miss.seed = 1;
  return inject(data, miss).data.without_roles({Role::driver});
}

void BM_Nipals(benchmark::State& state) {
  const auto m = standardize(masked_analog(static_cast<std::size_t>(state.range(0))));
  NipalsConfig cfg;
  cfg.k = 3;
  cfg.require_convergence = false;
  for (auto _ : state) benchmark::DoNotOptimize(nipals(m, cfg));
}
BENCHMARK(BM_Nipals)->Arg(500)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Ppca(benchmark::State& state) {
  const auto m = masked_analog(static_cast<std::size_t>(state.range(0)));
  PpcaConfig cfg;
  cfg.k = 2;
  for (auto _ : state) benchmark::DoNotOptimize(impute_ppca(m, cfg, 1));
}
BENCHMARK(BM_Ppca)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Pmm(benchmark::State& state) {
  const auto m = masked_analog(static_cast<std::size_t>(state.range(0)));
  PmmConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(impute_pmm(m, cfg, 1));
}
BENCHMARK(BM_Pmm)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MissForest(benchmark::State& state) {
  const auto m = masked_analog(static_cast<std::size_t>(state.range(0)));
  ForestConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(impute_missforest(m, cfg, 1));
}
BENCHMARK(BM_MissForest)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_EstimateK(benchmark::State& state) {
  const auto m = masked_analog(1000);
  NipalsConfig cfg;
  cfg.require_convergence = false;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_k(m, 5, 5, 1, cfg));
}
BENCHMARK(BM_EstimateK)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
