#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hexcell/scenario.hpp"

namespace hexcell {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A load trace that breaks the boundedness assumption behind the error bound.
class AssumptionViolation : public std::invalid_argument {
 public:
  AssumptionViolation(const std::string& what, int cell, int slot)
      : std::invalid_argument(what), cell_(cell), slot_(slot) {}
  int cell() const { return cell_; }
  int slot() const { return slot_; }

 private:
  int cell_;
  int slot_;
};

// Communication graph over cells and its consensus weights. weights(m, j) is
// 1/|N_m| for neighbours (halved, plus 1/2 on the diagonal, in lazy mode).
struct NeighborGraph {
  int num_nodes = 0;
  std::vector<std::vector<int>> neighbors;
  Eigen::MatrixXd weights;
  // Largest eigenvalue modulus of the weights away from the consensus
  // direction.
  double lambda = 0.0;
  bool lazy = false;
  std::vector<std::string> warnings;
};

// Cells within chi metres of each other are neighbours. Throws GraphError if
// the graph is disconnected or has fewer than two nodes.
NeighborGraph BuildGraph(const CellLayout& layout, double chi_m,
                         bool lazy = false);

// Same from explicit undirected adjacency lists.
NeighborGraph BuildGraph(std::vector<std::vector<int>> adjacency,
                         bool lazy = false);

// Spectral radius of the weights restricted to the disagreement subspace.
double DisagreementSpectralRadius(const std::vector<std::vector<int>>& adjacency,
                                  bool lazy);

struct ConsensusState {
  std::vector<double> estimate;   // rho_{m,t}
  std::vector<double> last_load;  // L_{m,t}
};

// rho_{m,1} = L_{m,1}.
ConsensusState InitConsensus(std::span<const double> loads);

// Single-node update. Sees only its own estimate, its own load change and
// the estimates its neighbours sent.
double UpdateNode(double own_estimate, double load_delta,
                  std::span<const double> neighbor_estimates,
                  std::span<const double> neighbor_weights);

// One synchronous round: every node updates from the same snapshot.
void ConsensusStep(ConsensusState& state, std::span<const double> new_loads,
                   const NeighborGraph& graph);

double ExactAverage(std::span<const double> loads);

struct BoundReport {
  double lambda = 0.0;
  double zeta = 0.0;
  double max_error = 0.0;           // max over all (m, t)
  double max_error_trailing = 0.0;  // max over the trailing 20% of slots
  double bound = 0.0;               // (3 - lambda) zeta / (1 - lambda)
  double asymptotic_bound = 0.0;    // 2 zeta / (1 - lambda)
  int worst_cell = -1;
  int worst_slot = -1;
  bool holds_uniform = false;
  bool holds_asymptotic = false;
  bool holds = false;
};

struct ConsensusTraceRow {
  int slot = 0;
  int cell = 0;
  double estimate = 0.0;
  double average = 0.0;
  double error = 0.0;
};

// Runs the estimator over loads[t][m] (t = 0 is slot 1) and checks the error
// bound at every (m, t). zeta defaults to the trace's max of |L| and |dL|.
// Throws std::invalid_argument if lambda >= 1 and AssumptionViolation if the
// trace exceeds zeta.
BoundReport VerifyBound(const std::vector<std::vector<double>>& loads,
                        const NeighborGraph& graph,
                        std::optional<double> zeta = std::nullopt,
                        std::vector<ConsensusTraceRow>* trace = nullptr);

}  // namespace hexcell
