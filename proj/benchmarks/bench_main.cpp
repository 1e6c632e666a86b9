#include <benchmark/benchmark.h>

#include "spb/bounds.hpp"
#include "spb/experiments.hpp"
#include "spb/generators.hpp"
#include "spb/linalg.hpp"
#include "spb/newton.hpp"
#include "spb/rng.hpp"

using namespace spb;

namespace {

SymMatrix noise(Index n, double sigma, std::uint64_t seed) {
  return gen_gaussian_perturbation(n, sigma, SeededRng(seed, 0));
}

void BM_TwoToInfNorm(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix b = noise(n, 1.0, 1).dense().leftCols(8);
  for (auto _ : state) benchmark::DoNotOptimize(two_to_inf_norm(b));
  state.SetComplexityN(n);
}
BENCHMARK(BM_TwoToInfNorm)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_SymNormEnclosure(benchmark::State& state) {
  const Index n = state.range(0);
  const SymMatrix e = noise(n, 1.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sym_norm2_enclosure(e.dense()));
}
BENCHMARK(BM_SymNormEnclosure)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

void BM_SpectralSplit(benchmark::State& state) {
  const Index n = state.range(0);
  const SymMatrix a = gen_low_rank(n).a();
  for (auto _ : state) benchmark::DoNotOptimize(spectral_split(a, 2));
}
BENCHMARK(BM_SpectralSplit)->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond);

void BM_NewtonSubspace(benchmark::State& state) {
  const Index n = state.range(0);
  const SpectralSplit split = gen_low_rank(n).split;
  const SymMatrix e = noise(n, 1.0 / static_cast<double>(n), 3);
  NewtonOptions opts;
  opts.build_complement = false;
  opts.backend = state.range(1) == 0 ? SylvesterBackend::Diagonalized : SylvesterBackend::ShiftedCholesky;
  for (auto _ : state) benchmark::DoNotOptimize(newton_subspace(split, e, opts));
}
BENCHMARK(BM_NewtonSubspace)
    ->ArgsProduct({{128, 256, 512}, {0, 1}})
    ->ArgNames({"n", "cholesky"})
    ->Unit(benchmark::kMillisecond);

void BM_MainBound(benchmark::State& state) {
  const Index n = state.range(0);
  const SpectralSplit split = gen_coherent(n).split;
  const SymMatrix e = noise(n, 1.0 / static_cast<double>(n), 4);
  for (auto _ : state) benchmark::DoNotOptimize(theorem_main_bound(split, e, false));
}
BENCHMARK(BM_MainBound)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

void BM_SweepTrial(benchmark::State& state) {
  SweepConfig cfg;
  cfg.family = Family::LowRank;
  cfg.n_values = {state.range(0)};
  cfg.sigma_rule = SigmaRule::power(1.0);
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg));
}
BENCHMARK(BM_SweepTrial)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
