#include <benchmark/benchmark.h>

#include "hexcell/consensus.hpp"
#include "hexcell/runner.hpp"
#include "hexcell/scenario.hpp"

namespace hexcell {
namespace {

void BM_ConsensusStep(benchmark::State& state) {
  ScenarioConfig sc;
  sc.grid_side = static_cast<int>(state.range(0));
  sc.map_size_m = 1000.0 * sc.grid_side;
  const NeighborGraph g = BuildGraph(BuildLayout(sc), 2000.0);
  const auto loads = SyntheticLoads(64, g.num_nodes, 1.0, 3);
  ConsensusState s = InitConsensus(loads[0]);
  std::size_t t = 0;
  for (auto _ : state) {
    ConsensusStep(s, loads[++t % loads.size()], g);
  }
  benchmark::DoNotOptimize(s.estimate.data());
}
BENCHMARK(BM_ConsensusStep)->Arg(3)->Arg(5)->Arg(10);

void BM_VerifyBound(benchmark::State& state) {
  const NeighborGraph g = BuildGraph(BuildLayout(ScenarioConfig{}), 2000.0);
  const auto loads = SyntheticLoads(static_cast<int>(state.range(0)), g.num_nodes, 1.0, 4);
  for (auto _ : state) benchmark::DoNotOptimize(VerifyBound(loads, g, 1.0));
}
BENCHMARK(BM_VerifyBound)->Arg(10000);

}  // namespace
}  // namespace hexcell
