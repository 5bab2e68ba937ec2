/// @file bench_main.cpp
/// @brief Micro-benchmarks of the hot kernels: diffusion, reaction, potential, level-set energy.

#include <benchmark/benchmark.h>

#include "rdlab/degiorgi.hpp"
#include "rdlab/model.hpp"
#include "rdlab/scenario.hpp"
#include "rdlab/solver.hpp"
#include "rdlab/weaknorm.hpp"

using namespace rdlab;

namespace {

ScenarioConfig bench_config(int n) {
  auto cfg = standard_scenario();
  cfg.grid = GridSpec(3, n, 8.0);
  return cfg;
}

void BM_DiffusionStep(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<int>(state.range(0)));
  const auto field = make_initial(cfg);
  const auto diffusion = cfg.diffusion();
  for (auto _ : state) benchmark::DoNotOptimize(diffusion_step(field, diffusion, cfg.dt));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.grid.cells()));
}
BENCHMARK(BM_DiffusionStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ReactionStep(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<int>(state.range(0)));
  const auto field = make_initial(cfg);
  const auto model = cfg.model();
  for (auto _ : state) benchmark::DoNotOptimize(reaction_step(model, field, cfg.dt));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.grid.cells()));
}
BENCHMARK(BM_ReactionStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_NewtonianPotential(benchmark::State& state) {
  const GridSpec grid(3, static_cast<int>(state.range(0)), 8.0);
  NewtonianSolver solver(grid);
  const auto f = ball_mask(grid, {0.0, 0.0, 0.0}, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solver.potential(f));
}
BENCHMARK(BM_NewtonianPotential)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LevelSetEnergy(benchmark::State& state) {
  auto cfg = bench_config(32);
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  cfg.dt_store = 0.1;
  const auto res = run(cfg.model(), cfg.diffusion(), make_initial(cfg), cfg.settings());
  TruncationLadder ladder;
  ladder.anchor.t = 2.0;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_Un(res.slab, ladder, n));
}
BENCHMARK(BM_LevelSetEnergy)->Arg(0)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
