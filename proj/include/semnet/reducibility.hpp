// Greedy layer aggregation with the relative-entropy quality curve; decides
// whether a multilayer network is structurally reducible.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "semnet/graph.hpp"
#include "semnet/spectral.hpp"

namespace semnet {

struct LayerPartition {
  std::vector<std::vector<std::size_t>> blocks;  // disjoint layer-index sets
};

struct MergeStep {
  std::vector<std::size_t> left;   // layer indices of the two merged blocks
  std::vector<std::size_t> right;
  double js = 0.0;                 // distance between them at merge time
};

struct ReductionReport {
  std::vector<std::string> layer_names;  // index-aligned with blocks
  std::vector<MergeStep> steps;          // n_layers - 1 merges
  std::vector<double> q_curve;           // q per configuration, fully separate -> fully merged
  std::vector<LayerPartition> partitions;  // configuration after k merges
  LayerPartition optimal;
  bool irreducible = false;
  bool degenerate = false;  // every q equal within tolerance
  double aggregate_entropy_bits = 0.0;   // h(A)
  EntropyMethod method = EntropyMethod::exact;
};

struct ReduceOptions {
  std::size_t exact_eigen_max = 4000;  // aligned size above this switches to SLQ
  SlqOptions slq;
  int threads = 1;
};

// Union node set over all layers in lexicographic word order; layers are
// compared on this order, padded with isolated nodes.
std::vector<NodeId> aligned_node_order(const MultilayerNetwork& m);

// Greedy agglomeration: repeatedly merge (weight-sum aggregation) the pair of
// blocks with minimal Jensen-Shannon distance, recording
// q(C) = 1 - mean block entropy / h(A) after every configuration. Optimal is
// the argmax of q; ties prefer more blocks, so reduction must strictly win.
ReductionReport reduce(const MultilayerNetwork& m, const ReduceOptions& opts = {});

std::string reduction_report_json(const ReductionReport& report);
std::string q_curve_csv(const ReductionReport& report);

}  // namespace semnet
