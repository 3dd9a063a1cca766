// Spreading-activation engine: semantic priming simulated over one layer,
// plus the unweighted-hop diameter that fixes the default step count.
#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semnet/graph.hpp"

namespace semnet {

struct SpreadParams {
  double initial_activation = 1.0;  // standard default: node count of the layer
  int time_steps = 1;               // standard default: 2 x unweighted diameter
  double retention = 0.5;
  double decay = 0.0;
  double suppress = 0.0;
};

// Standard defaults given the layer and its (precomputed) diameter.
SpreadParams default_spread_params(const WeightedGraph& g, int diameter_hops);

enum class DiameterMode { exact, approx };

struct DiameterResult {
  int value = 0;
  bool certified = false;  // approx mode: true when the iFUB bound closed
  std::size_t bfs_runs = 0;
};

// Unweighted hop diameter. exact: all-pairs BFS. approx: double sweep +
// iFUB level descent, certified when the lower bound crosses 2(i-1).
DiameterResult diameter(const WeightedGraph& g, DiameterMode mode = DiameterMode::approx);

struct ActivationVector {
  NodeId prime = 0;
  SpreadParams params;
  Eigen::VectorXd values;  // indexed like g.nodes()
};

// Synchronous spreadr-style update: each node keeps retention * a_i (all of
// it when degree 0) and the rest flows to neighbours proportionally to edge
// weight over the sender's strength; decay then suppress apply afterwards.
ActivationVector spread(const WeightedGraph& g, NodeId prime, const SpreadParams& p);

struct ActivationMatrix {
  std::vector<std::string> primes;   // words present in the layer, input order
  std::vector<std::string> targets;
  Eigen::MatrixXd values;            // primes x targets
  bool normalized = false;
  std::vector<std::string> missing_primes;   // coverage report
  std::vector<std::string> missing_targets;
  std::vector<std::string> zero_targets;  // columns excluded by normalization
  SpreadParams params;
};

ActivationMatrix activation_matrix(const WeightedGraph& g, const StringTable& words,
                                   std::span<const std::string> primes,
                                   std::span<const std::string> targets, const SpreadParams& p,
                                   int threads = 1);

std::string activation_matrix_csv(const ActivationMatrix& m);

}  // namespace semnet
