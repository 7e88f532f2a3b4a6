#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hexcell/consensus.hpp"

namespace hexcell {
namespace {

std::vector<std::vector<int>> Triangle() { return {{1, 2}, {0, 2}, {0, 1}}; }

std::vector<std::vector<int>> Line(int n) {
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i + 1 < n; ++i) {
    adj[i].push_back(i + 1);
    adj[i + 1].push_back(i);
  }
  return adj;
}

// Connected random graph: a random spanning tree plus extra edges.
std::vector<std::vector<int>> RandomGraph(int n, Rng& rng) {
  std::vector<std::vector<int>> adj(n);
  auto add = [&](int a, int b) {
    if (a == b) return;
    if (std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end()) return;
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int v = 1; v < n; ++v) add(v, static_cast<int>(rng.UniformInt(v)));
  const int extra = static_cast<int>(rng.UniformInt(2 * n));
  for (int e = 0; e < extra; ++e) {
    add(static_cast<int>(rng.UniformInt(n)), static_cast<int>(rng.UniformInt(n)));
  }
  return adj;
}

TEST(Graph, CornerNeighborsMatchBruteForce) {
  ScenarioConfig sc;
  const auto layout = BuildLayout(sc);
  const auto g = BuildGraph(layout, 2000.0);
  // brute force distance check: with 1000 m spacing only (1,0), (2,0),
  // (0,1), (0,2) and (1,1) lie within 2000 m of the corner
  int count = 0;
  for (int j = 1; j < 25; ++j) {
    if (Distance(layout.cells[0].center, layout.cells[j].center) <= 2000.0) ++count;
  }
  EXPECT_EQ(count, 5);
  EXPECT_EQ(g.neighbors[0].size(), static_cast<std::size_t>(count));
  EXPECT_LT(g.lambda, 1.0);
}

TEST(Graph, TriangleLambdaIsOneHalf) {
  const auto g = BuildGraph(Triangle());
  EXPECT_NEAR(g.lambda, 0.5, 1e-12);
  // Independent check with a general eigen-solver on the weight matrix.
  Eigen::EigenSolver<Eigen::MatrixXd> es(g.weights);
  std::vector<double> mods;
  for (int i = 0; i < 3; ++i) mods.push_back(std::abs(es.eigenvalues()[i]));
  std::sort(mods.begin(), mods.end());
  EXPECT_NEAR(mods[1], 0.5, 1e-12);
  EXPECT_NEAR(mods[2], 1.0, 1e-12);
  EXPECT_TRUE(g.warnings.empty());
}

TEST(Graph, TwoNodesHaveUnitLambdaAndWarn) {
  const auto g = BuildGraph({{1}, {0}});
  EXPECT_NEAR(g.lambda, 1.0, 1e-12);
  EXPECT_FALSE(g.warnings.empty());
}

TEST(Graph, LazyWeightsBringLambdaBelowOne) {
  const auto g = BuildGraph({{1}, {0}}, true);
  EXPECT_LT(g.lambda, 1.0);
  EXPECT_DOUBLE_EQ(g.weights(0, 0), 0.5);
}

TEST(Graph, DisconnectedIsError) {
  EXPECT_THROW(BuildGraph({{1}, {0}, {3}, {2}}), GraphError);
  EXPECT_THROW(BuildGraph({{}}), GraphError);
}

TEST(Graph, RowsSumToOne) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.UniformInt(24));
    const auto g = BuildGraph(RandomGraph(n, rng), trial % 2 == 0);
    for (int m = 0; m < n; ++m) EXPECT_NEAR(g.weights.row(m).sum(), 1.0, 1e-12);
  }
}

TEST(Update, TriangleHandTrace) {
  const auto g = BuildGraph(Triangle());
  const std::vector<double> loads{0.0, 3.0, 6.0};
  ConsensusState s = InitConsensus(loads);
  EXPECT_EQ(s.estimate, loads);
  ConsensusStep(s, loads, g);
  EXPECT_EQ(s.estimate, (std::vector<double>{4.5, 3.0, 1.5}));
}

TEST(Update, ConstantEqualLoadsStayPut) {
  const auto g = BuildGraph(Line(5));
  const std::vector<double> loads(5, 2.5);
  ConsensusState s = InitConsensus(loads);
  for (int t = 0; t < 50; ++t) {
    ConsensusStep(s, loads, g);
    for (double e : s.estimate) EXPECT_EQ(e, 2.5);
  }
}

TEST(Update, UnchangedLoadsAndAgreementIsFixedPoint) {
  const auto g = BuildGraph(Triangle());
  ConsensusState s;
  s.estimate = {1.0, 1.0, 1.0};
  s.last_load = {0.0, 2.0, 4.0};
  ConsensusStep(s, s.last_load, g);
  EXPECT_EQ(s.estimate, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(Update, ExactAverage) {
  EXPECT_DOUBLE_EQ(ExactAverage(std::vector<double>{1, 2, 3}), 2.0);
  EXPECT_DOUBLE_EQ(ExactAverage(std::vector<double>{0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(ExactAverage(std::vector<double>{0, 3, 6}), 3.0);
}

TEST(ConsensusProperty, GeometricDecayWithStaticLoads) {
  // With static loads the estimates converge geometrically at rate lambda.
  // Row-stochastic weights settle on the degree-weighted mean, which is the
  // plain average on regular graphs.
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.UniformInt(20));
    const auto g = BuildGraph(RandomGraph(n, rng), true);
    ASSERT_LT(g.lambda, 1.0);
    std::vector<double> loads(n);
    for (auto& l : loads) l = rng.Uniform(0.0, 5.0);
    double num = 0.0, den = 0.0;
    std::size_t dmax = 0, dmin = n;
    for (int m = 0; m < n; ++m) {
      const auto d = g.neighbors[m].size();
      num += static_cast<double>(d) * loads[m];
      den += static_cast<double>(d);
      dmax = std::max(dmax, d);
      dmin = std::min(dmin, d);
    }
    const double limit = num / den;
    ConsensusState s = InitConsensus(loads);
    double e1 = 0.0;
    for (double v : s.estimate) e1 = std::max(e1, std::abs(v - limit));
    // sqrt(n max deg / min deg) bounds the non-orthogonality of the
    // eigenbasis of the weights.
    const double c = std::sqrt(static_cast<double>(n) * static_cast<double>(dmax) /
                               static_cast<double>(dmin));
    for (int t = 2; t <= 60; ++t) {
      ConsensusStep(s, loads, g);
      double e = 0.0;
      for (double v : s.estimate) e = std::max(e, std::abs(v - limit));
      ASSERT_LE(e, std::pow(g.lambda, t - 1) * e1 * c + 1e-12)
          << "trial " << trial << " t " << t;
    }
  }
}

TEST(ConsensusProperty, RegularGraphsConvergeToAverage) {
  std::vector<std::vector<int>> ring(6);
  for (int i = 0; i < 6; ++i) {
    ring[i] = {(i + 1) % 6, (i + 5) % 6};
  }
  for (bool lazy : {false, true}) {
    const auto g = BuildGraph(ring, lazy);
    if (!(g.lambda < 1.0 - 1e-9)) continue;  // the plain 6-ring is bipartite
    const std::vector<double> loads{0, 1, 4, 2, 8, 3};
    const double avg = ExactAverage(loads);
    ConsensusState s = InitConsensus(loads);
    double e1 = 0.0;
    for (double v : s.estimate) e1 = std::max(e1, std::abs(v - avg));
    for (int t = 2; t <= 80; ++t) {
      ConsensusStep(s, loads, g);
      double e = 0.0;
      for (double v : s.estimate) e = std::max(e, std::abs(v - avg));
      ASSERT_LE(e, std::pow(g.lambda, t - 1) * e1 * std::sqrt(6.0) + 1e-12);
    }
  }
}

TEST(ConsensusProperty, PermutationEquivariant) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng.UniformInt(10));
    const auto adj = RandomGraph(n, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.Shuffle(perm.begin(), perm.end());
    std::vector<std::vector<int>> padj(n);
    for (int m = 0; m < n; ++m) {
      for (int j : adj[m]) padj[perm[m]].push_back(perm[j]);
    }
    const auto g = BuildGraph(adj);
    const auto pg = BuildGraph(padj);
    std::vector<double> l0(n), l1(n), pl0(n), pl1(n);
    for (int m = 0; m < n; ++m) {
      l0[m] = rng.Uniform();
      l1[m] = rng.Uniform();
      pl0[perm[m]] = l0[m];
      pl1[perm[m]] = l1[m];
    }
    ConsensusState s = InitConsensus(l0), ps = InitConsensus(pl0);
    ConsensusStep(s, l1, g);
    ConsensusStep(ps, pl1, pg);
    for (int m = 0; m < n; ++m) EXPECT_NEAR(ps.estimate[perm[m]], s.estimate[m], 1e-12);
  }
}

TEST(ConsensusProperty, UpdateReadsOnlyNeighbors) {
  // Changing a non-neighbour's estimate never changes a node's update.
  const auto g = BuildGraph(Line(5));
  std::vector<double> loads{1, 2, 3, 4, 5};
  ConsensusState a = InitConsensus(loads);
  ConsensusState b = a;
  b.estimate[4] = 100.0;  // not a neighbour of node 0, 1 or 2
  ConsensusStep(a, loads, g);
  ConsensusStep(b, loads, g);
  for (int m = 0; m < 3; ++m) EXPECT_EQ(a.estimate[m], b.estimate[m]);
  EXPECT_NE(a.estimate[3], b.estimate[3]);
}

TEST(ConsensusProperty, UpdateNodeUsesOnlyWhatItIsGiven) {
  const std::vector<double> nb{2.0, 4.0};
  const std::vector<double> w{0.5, 0.5};
  EXPECT_DOUBLE_EQ(UpdateNode(0.0, 1.0, nb, w), 4.0);
}

TEST(Bound, ConstantLoadsGiveZeroError) {
  const auto g = BuildGraph(Triangle());
  std::vector<std::vector<double>> loads(100, std::vector<double>(3, 0.7));
  const auto r = VerifyBound(loads, g);
  // only the rounding of the mean of three equal values remains
  EXPECT_LE(r.max_error, 1e-15);
  EXPECT_TRUE(r.holds);
}

TEST(Bound, RandomBoundedLoadsHold) {
  ScenarioConfig sc;
  const auto g = BuildGraph(BuildLayout(sc), 2000.0);
  Rng rng(9);
  std::vector<std::vector<double>> loads(2000, std::vector<double>(25));
  for (auto& row : loads) {
    for (auto& v : row) v = rng.Uniform(0.0, 1.0);
  }
  std::vector<ConsensusTraceRow> trace;
  const auto r = VerifyBound(loads, g, 1.0, &trace);
  EXPECT_TRUE(r.holds_uniform);
  EXPECT_TRUE(r.holds_asymptotic);
  EXPECT_EQ(trace.size(), 2000u * 25u);
  EXPECT_NEAR(r.bound, (3 - r.lambda) / (1 - r.lambda), 1e-12);
}

TEST(Bound, ViolatingTraceNamesCellAndSlot) {
  const auto g = BuildGraph(Triangle());
  std::vector<std::vector<double>> loads(5, std::vector<double>(3, 0.1));
  loads[3][2] = 5.0;
  try {
    VerifyBound(loads, g, 1.0);
    FAIL() << "expected AssumptionViolation";
  } catch (const AssumptionViolation& e) {
    EXPECT_EQ(e.cell(), 2);
    EXPECT_EQ(e.slot(), 4);
  }
}

TEST(Bound, UnitLambdaIsRejected) {
  const auto g = BuildGraph({{1}, {0}});
  std::vector<std::vector<double>> loads(3, std::vector<double>(2, 0.1));
  EXPECT_THROW(VerifyBound(loads, g), std::invalid_argument);
}

}  // namespace
}  // namespace hexcell
