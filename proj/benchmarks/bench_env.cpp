#include <benchmark/benchmark.h>

#include "hexcell/config.hpp"
#include "hexcell/env.hpp"

namespace hexcell {
namespace {

EnvConfig DeskEnv(int grid_side, int num_ues) {
  EnvConfig c;
  c.scenario.map_size_m = 1000.0 * grid_side;
  c.scenario.grid_side = grid_side;
  c.scenario.num_ues = num_ues;
  c.scenario.ou_params.mu_x = c.scenario.ou_params.mu_y = {100.0 * grid_side, 900.0 * grid_side};
  c.scenario.ou_params.sigma_x = c.scenario.ou_params.sigma_y = {100.0 * grid_side,
                                                                 1000.0 * grid_side};
  c.observation = {500.0, 2, 5};
  return c;
}

void BM_EnvStep(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const int ues = static_cast<int>(state.range(1));
  Environment env(DeskEnv(side, ues));
  const std::vector<ActionVector> actions(side * side, MidRangeAction());
  uint64_t seed = 1;
  env.Reset(seed);
  for (auto _ : state) {
    if (env.done()) {
      state.PauseTiming();
      env.Reset(++seed);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(env.Step(actions));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnvStep)->Args({3, 60})->Args({5, 500});

void BM_EnvReset(benchmark::State& state) {
  Environment env(DeskEnv(3, 60));
  uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(env.Reset(++seed));
}
BENCHMARK(BM_EnvReset);

}  // namespace
}  // namespace hexcell
