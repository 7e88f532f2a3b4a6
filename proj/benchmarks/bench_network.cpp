#include <benchmark/benchmark.h>

#include "hexcell/learner.hpp"
#include "hexcell/network.hpp"

namespace hexcell {
namespace {

Network PolicyNet(int kappa) {
  const ObservationConfig oc{500.0, kappa, 5};
  return Network(InitParams(PolicyShape(oc, PpoConfig{}), 1, 0.01));
}

Mat RandomInput(const NetShape& s) {
  Rng rng(2);
  Mat x(s.tokens(), s.channels);
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) x(i, j) = rng.Uniform(0.0, 3.0);
  }
  return x;
}

void BM_PolicyForward(benchmark::State& state) {
  const Network net = PolicyNet(static_cast<int>(state.range(0)));
  const Mat x = RandomInput(net.shape());
  for (auto _ : state) benchmark::DoNotOptimize(net.Forward(x));
}
BENCHMARK(BM_PolicyForward)->Arg(2)->Arg(7);

void BM_PolicyForwardBackward(benchmark::State& state) {
  const Network net = PolicyNet(static_cast<int>(state.range(0)));
  const Mat x = RandomInput(net.shape());
  NetParams grad = NetParams::Zeros(net.shape());
  const RowVec d_out = RowVec::Constant(net.shape().outputs, 0.01);
  ForwardCache cache;
  for (auto _ : state) {
    net.Forward(x, &cache);
    net.Backward(cache, d_out, grad);
  }
  benchmark::DoNotOptimize(grad);
}
BENCHMARK(BM_PolicyForwardBackward)->Arg(2)->Arg(7);

}  // namespace
}  // namespace hexcell
