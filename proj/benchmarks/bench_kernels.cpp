#include <benchmark/benchmark.h>

#include "cassi/cassi.hpp"

namespace {

using namespace cassi;

struct Fixture {
  SceneConfig sc;
  SensingOperator op;
  HSICube x;
  Measurement y;

  explicit Fixture(std::size_t side, std::size_t bands)
      : sc(SceneConfig::make(side, side, bands, 2)),
        op(build_operator(ensure_full_rank(gen_mask(side, side, 0.5, 1), sc), sc)),
        x(gen_scene(sc, 6, 2)),
        y(phi_apply(op, x)) {}
};

// Args: side, bands.
void BM_PhiApply(benchmark::State& state) {
  const Fixture f(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(phi_apply(f.op, f.x));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.x.size()));
}

void BM_PhiTApply(benchmark::State& state) {
  const Fixture f(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(phi_t_apply(f.op, f.y));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.x.size()));
}

void BM_PinvApply(benchmark::State& state) {
  const Fixture f(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(pinv_apply(f.op, f.y));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.x.size()));
}

void BM_RndCombine(benchmark::State& state) {
  const Fixture f(state.range(0), state.range(1));
  const HSICube q(f.sc);
  for (auto _ : state) benchmark::DoNotOptimize(rnd_combine(f.op, f.y, q));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.x.size()));
}

void BM_BuildOperator(benchmark::State& state) {
  const Fixture f(state.range(0), state.range(1));
  const CodedAperture mask = ensure_full_rank(gen_mask(f.sc.height, f.sc.width, 0.5, 1), f.sc);
  for (auto _ : state) benchmark::DoNotOptimize(build_operator(mask, f.sc));
}

// Args: side, bands, inner iterations.
void BM_TvDenoise(benchmark::State& state) {
  const Fixture f(state.range(0), state.range(1));
  const auto inner = static_cast<std::size_t>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(tv_denoise(f.x, 0.05, inner));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.x.size()));
}

void BM_GapTvIteration(benchmark::State& state) {
  const Fixture f(state.range(0), state.range(1));
  SolverConfig cfg;
  cfg.iterations = 1;
  const TvPrior prior(cfg.tv_inner_iterations);
  for (auto _ : state) benchmark::DoNotOptimize(gap_solve(f.op, f.y, prior, cfg));
}

}  // namespace

BENCHMARK(BM_PhiApply)->Args({64, 8})->Args({256, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PhiTApply)->Args({64, 8})->Args({256, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PinvApply)->Args({64, 8})->Args({256, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RndCombine)->Args({64, 8})->Args({256, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildOperator)->Args({256, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TvDenoise)->Args({64, 8, 20})->Args({256, 28, 20})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GapTvIteration)->Args({64, 8})->Args({256, 28})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
