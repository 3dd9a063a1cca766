#include "semnet/reducibility.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semnet/graph_io.hpp"
#include "semnet/parallel.hpp"

namespace semnet {
namespace {

constexpr double kQTolerance = 1e-12;

// Blocks always aggregate their member layers in ascending layer order from
// scratch, so a block's graph (and entropy) is independent of merge history;
// in particular the final single block reproduces h(A) bit for bit and the
// last q is exactly 0.
WeightedGraph block_graph(const std::vector<WeightedGraph>& aligned,
                          const std::vector<std::size_t>& members) {
  WeightedGraph g = aligned[members.front()];
  for (std::size_t i = 1; i < members.size(); ++i) g = aggregate(g, aligned[members[i]]);
  return g;
}

}  // namespace

std::vector<NodeId> aligned_node_order(const MultilayerNetwork& m) {
  std::set<NodeId> ids;
  for (const auto& [kind, layer] : m.layers)
    ids.insert(layer.nodes().begin(), layer.nodes().end());

  std::vector<NodeId> order(ids.begin(), ids.end());
  std::sort(order.begin(), order.end(),
            [&](NodeId a, NodeId b) { return m.words.word(a) < m.words.word(b); });
  return order;
}

ReductionReport reduce(const MultilayerNetwork& m, const ReduceOptions& opts) {
  const std::size_t n = m.layers.size();
  if (n < 2) throw Error(ErrorCode::TooFewLayers, "reduction needs at least two layers");

  const std::vector<NodeId> order = aligned_node_order(m);
  ReductionReport report;
  report.method =
      order.size() <= opts.exact_eigen_max ? EntropyMethod::exact : EntropyMethod::estimated;
  for (const auto& [kind, layer] : m.layers) report.layer_names.emplace_back(to_string(kind));

  SlqOptions slq = opts.slq;
  slq.threads = opts.threads;
  auto entropy_of = [&](const DensityMatrix& rho) {
    return von_neumann_entropy(rho, report.method, slq).entropy_bits;
  };

  struct Block {
    std::vector<std::size_t> members;
    DensityMatrix rho;
    double entropy = 0.0;
  };

  // Pad every layer with isolated nodes onto the union node set so the
  // weight-sum aggregation operator applies between any two blocks.
  std::vector<WeightedGraph> aligned(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    aligned[i] = WeightedGraph::from_edges({order.begin(), order.end()},
                                           m.layers[i].second.edges());
  });

  // Singleton blocks, then the all-layers aggregate for h(A).
  std::vector<Block> blocks(n);
  for (std::size_t i = 0; i < n; ++i) blocks[i].members = {i};
  parallel_for(n, opts.threads,
               [&](std::size_t i) { blocks[i].rho = density_matrix(aligned[i], order); });
  for (auto& b : blocks) b.entropy = entropy_of(b.rho);

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  report.aggregate_entropy_bits = entropy_of(density_matrix(block_graph(aligned, all), order));
  if (!(report.aggregate_entropy_bits > 0.0))
    throw Error(ErrorCode::NoEdges, "aggregate network has zero entropy");

  auto record_configuration = [&] {
    double mean = 0.0;
    LayerPartition partition;
    for (const auto& b : blocks) {
      mean += b.entropy;
      partition.blocks.push_back(b.members);
    }
    mean /= static_cast<double>(blocks.size());
    report.q_curve.push_back(1.0 - mean / report.aggregate_entropy_bits);
    report.partitions.push_back(std::move(partition));
  };
  record_configuration();

  // Pairwise distances, recomputed only against the freshly merged block.
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    parallel_for(pairs.size(), opts.threads, [&](std::size_t k) {
      auto [i, j] = pairs[k];
      dist[i][j] = dist[j][i] = js_distance(blocks[i].rho, blocks[j].rho, report.method, slq);
    });
  }

  while (blocks.size() > 1) {
    // Minimal distance; ties resolved lexicographically by block position
    // (blocks stay ordered by smallest member index).
    std::size_t best_i = 0, best_j = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (std::size_t j = i + 1; j < blocks.size(); ++j)
        if (dist[i][j] < best) {
          best = dist[i][j];
          best_i = i;
          best_j = j;
        }

    MergeStep step;
    step.left = blocks[best_i].members;
    step.right = blocks[best_j].members;
    step.js = best;
    report.steps.push_back(std::move(step));

    Block merged;
    merged.members = blocks[best_i].members;
    merged.members.insert(merged.members.end(), blocks[best_j].members.begin(),
                          blocks[best_j].members.end());
    std::sort(merged.members.begin(), merged.members.end());
    merged.rho = density_matrix(block_graph(aligned, merged.members), order);
    merged.entropy = entropy_of(merged.rho);

    blocks[best_i] = std::move(merged);
    blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(best_j));
    for (auto& row : dist) row.erase(row.begin() + static_cast<std::ptrdiff_t>(best_j));
    dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(best_j));

    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < blocks.size(); ++k)
      if (k != best_i) others.push_back(k);
    parallel_for(others.size(), opts.threads, [&](std::size_t idx) {
      std::size_t k = others[idx];
      dist[best_i][k] = dist[k][best_i] =
          js_distance(blocks[best_i].rho, blocks[k].rho, report.method, slq);
    });

    record_configuration();
  }

  // Argmax with tolerance, preferring the configuration with more blocks
  // (earlier index) on ties.
  double q_max = *std::max_element(report.q_curve.begin(), report.q_curve.end());
  double q_min = *std::min_element(report.q_curve.begin(), report.q_curve.end());
  std::size_t best_idx = 0;
  while (best_idx < report.q_curve.size() && report.q_curve[best_idx] < q_max - kQTolerance)
    ++best_idx;
  report.optimal = report.partitions[best_idx];
  report.irreducible = best_idx == 0;
  report.degenerate = q_max - q_min <= kQTolerance;
  return report;
}

std::string reduction_report_json(const ReductionReport& report) {
  nlohmann::ordered_json doc;
  doc["layers"] = report.layer_names;
  doc["method"] = report.method == EntropyMethod::exact ? "exact" : "estimated";
  doc["aggregate_entropy_bits"] = report.aggregate_entropy_bits;

  doc["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : report.steps) {
    nlohmann::ordered_json step;
    step["left"] = s.left;
    step["right"] = s.right;
    step["js_distance"] = s.js;
    doc["steps"].push_back(std::move(step));
  }
  doc["q_curve"] = report.q_curve;
  doc["optimal_blocks"] = report.optimal.blocks;
  doc["irreducible"] = report.irreducible;
  doc["degenerate"] = report.degenerate;
  return doc.dump(2) + "\n";
}

std::string q_curve_csv(const ReductionReport& report) {
  std::ostringstream out;
  out << "step,blocks,q\n";
  for (std::size_t k = 0; k < report.q_curve.size(); ++k)
    out << k << ',' << report.partitions[k].blocks.size() << ','
        << format_double(report.q_curve[k]) << '\n';
  return out.str();
}

}  // namespace semnet
