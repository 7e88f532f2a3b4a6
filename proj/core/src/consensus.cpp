#include "hexcell/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace hexcell {

namespace {

std::vector<std::vector<int>> Components(
    const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < n; ++start) {
    if (label[start] >= 0) continue;
    std::vector<int> comp;
    std::vector<int> stack{start};
    label[start] = static_cast<int>(out.size());
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (int w : adjacency[v]) {
        if (label[w] < 0) {
          label[w] = label[start];
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace

double DisagreementSpectralRadius(
    const std::vector<std::vector<int>>& adjacency, bool lazy) {
  const int n = static_cast<int>(adjacency.size());
  if (n < 2) return 0.0;
  // D^-1 A is similar to the symmetric D^-1/2 A D^-1/2, so its spectrum is
  // real and a self-adjoint solver applies.
  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    for (int j : adjacency[m]) {
      sym(m, j) = 1.0 / std::sqrt(static_cast<double>(adjacency[m].size()) *
                                  static_cast<double>(adjacency[j].size()));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym,
                                                        Eigen::EigenvaluesOnly);
  Eigen::VectorXd mu = solver.eigenvalues();  // ascending; mu[n-1] == 1
  double radius = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double v = lazy ? 0.5 * (1.0 + mu[i]) : mu[i];
    radius = std::max(radius, std::abs(v));
  }
  return radius;
}

NeighborGraph BuildGraph(std::vector<std::vector<int>> adjacency, bool lazy) {
  const int n = static_cast<int>(adjacency.size());
  if (n < 2) throw GraphError("neighbor graph needs at least two cells");
  for (auto& row : adjacency) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  const auto comps = Components(adjacency);
  if (comps.size() > 1) {
    std::ostringstream os;
    os << "neighbor graph is disconnected; components:";
    for (const auto& c : comps) {
      os << " {";
      for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
      os << "}";
    }
    throw GraphError(os.str());
  }

  NeighborGraph g;
  g.num_nodes = n;
  g.lazy = lazy;
  g.weights = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    const double w = (lazy ? 0.5 : 1.0) / static_cast<double>(adjacency[m].size());
    for (int j : adjacency[m]) g.weights(m, j) = w;
    if (lazy) g.weights(m, m) = 0.5;
  }
  g.lambda = DisagreementSpectralRadius(adjacency, lazy);
  if (g.lambda >= 1.0 - 1e-12) {
    std::ostringstream os;
    os << "disagreement spectral radius is " << g.lambda
       << " (>= 1): the consensus error bound is vacuous on this graph";
    g.warnings.push_back(os.str());
  }
  g.neighbors = std::move(adjacency);
  return g;
}

NeighborGraph BuildGraph(const CellLayout& layout, double chi_m, bool lazy) {
  const int n = layout.size();
  std::vector<std::vector<int>> adj(n);
  for (int m = 0; m < n; ++m) {
    for (int j = 0; j < n; ++j) {
      if (j != m &&
          Distance(layout.cells[m].center, layout.cells[j].center) <= chi_m) {
        adj[m].push_back(j);
      }
    }
  }
  return BuildGraph(std::move(adj), lazy);
}

ConsensusState InitConsensus(std::span<const double> loads) {
  ConsensusState s;
  s.estimate.assign(loads.begin(), loads.end());
  s.last_load.assign(loads.begin(), loads.end());
  return s;
}

double UpdateNode(double own_estimate, double load_delta,
                  std::span<const double> neighbor_estimates,
                  std::span<const double> neighbor_weights) {
  double mix = 0.0;
  for (std::size_t i = 0; i < neighbor_estimates.size(); ++i) {
    mix += neighbor_weights[i] * (neighbor_estimates[i] - own_estimate);
  }
  return own_estimate + load_delta + mix;
}

void ConsensusStep(ConsensusState& state, std::span<const double> new_loads,
                   const NeighborGraph& graph) {
  const int n = graph.num_nodes;
  if (static_cast<int>(new_loads.size()) != n ||
      static_cast<int>(state.estimate.size()) != n) {
    throw std::invalid_argument("ConsensusStep: size mismatch");
  }
  const std::vector<double> snapshot = state.estimate;
  std::vector<double> received;
  std::vector<double> weights;
  for (int m = 0; m < n; ++m) {
    received.clear();
    weights.clear();
    for (int j : graph.neighbors[m]) {
      received.push_back(snapshot[j]);
      weights.push_back(graph.weights(m, j));
    }
    state.estimate[m] = UpdateNode(snapshot[m], new_loads[m] - state.last_load[m],
                                   received, weights);
  }
  state.last_load.assign(new_loads.begin(), new_loads.end());
}

double ExactAverage(std::span<const double> loads) {
  if (loads.empty()) return 0.0;
  double s = 0.0;
  for (double v : loads) s += v;
  return s / static_cast<double>(loads.size());
}

BoundReport VerifyBound(const std::vector<std::vector<double>>& loads,
                        const NeighborGraph& graph, std::optional<double> zeta,
                        std::vector<ConsensusTraceRow>* trace) {
  if (!(graph.lambda < 1.0 - 1e-12)) {
    throw std::invalid_argument(
        "VerifyBound: spectral radius >= 1, the bound does not apply");
  }
  const int steps = static_cast<int>(loads.size());
  const int n = graph.num_nodes;
  for (const auto& row : loads) {
    if (static_cast<int>(row.size()) != n) {
      throw std::invalid_argument("VerifyBound: load row size mismatch");
    }
  }

  double z = 0.0;
  if (zeta) {
    z = *zeta;
  } else {
    for (int t = 0; t < steps; ++t) {
      for (int m = 0; m < n; ++m) {
        z = std::max(z, std::abs(loads[t][m]));
        if (t > 0) z = std::max(z, std::abs(loads[t][m] - loads[t - 1][m]));
      }
    }
  }
  for (int t = 0; t < steps; ++t) {
    for (int m = 0; m < n; ++m) {
      const bool level = std::abs(loads[t][m]) > z;
      const bool rate = t > 0 && std::abs(loads[t][m] - loads[t - 1][m]) > z;
      if (level || rate) {
        std::ostringstream os;
        os << "load trace violates the boundedness assumption at cell " << m
           << ", slot " << (t + 1) << (level ? " (|L| > zeta)" : " (|dL| > zeta)");
        throw AssumptionViolation(os.str(), m, t + 1);
      }
    }
  }

  BoundReport r;
  r.lambda = graph.lambda;
  r.zeta = z;
  r.bound = (3.0 - r.lambda) / (1.0 - r.lambda) * z;
  r.asymptotic_bound = 2.0 * z / (1.0 - r.lambda);
  if (steps == 0) {
    r.holds_uniform = r.holds_asymptotic = r.holds = true;
    return r;
  }

  const int trailing_from = steps - std::max(1, steps / 5);
  ConsensusState state = InitConsensus(loads[0]);
  for (int t = 0; t < steps; ++t) {
    if (t > 0) ConsensusStep(state, loads[t], graph);
    const double avg = ExactAverage(loads[t]);
    for (int m = 0; m < n; ++m) {
      const double err = std::abs(state.estimate[m] - avg);
      if (err > r.max_error) {
        r.max_error = err;
        r.worst_cell = m;
        r.worst_slot = t + 1;
      }
      if (t >= trailing_from) r.max_error_trailing = std::max(r.max_error_trailing, err);
      if (trace) {
        trace->push_back({t + 1, m, state.estimate[m], avg,
                          state.estimate[m] - avg});
      }
    }
  }
  r.holds_uniform = r.max_error <= r.bound;
  r.holds_asymptotic = r.max_error_trailing <= r.asymptotic_bound;
  r.holds = r.holds_uniform && r.holds_asymptotic;
  return r;
}

}  // namespace hexcell
