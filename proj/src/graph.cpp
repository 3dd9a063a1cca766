#include "semnet/graph.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <queue>

namespace semnet {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::MissingColumns: return "MissingColumns";
    case ErrorCode::EmptyAfterFiltering: return "EmptyAfterFiltering";
    case ErrorCode::UnalignedLayers: return "UnalignedLayers";
    case ErrorCode::TooFewLayers: return "TooFewLayers";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::UnknownPrime: return "UnknownPrime";
    case ErrorCode::NoPrimesPresent: return "NoPrimesPresent";
    case ErrorCode::NoUsablePairs: return "NoUsablePairs";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::EmptyReport: return "EmptyReport";
    case ErrorCode::BadGraphFile: return "BadGraphFile";
    case ErrorCode::NoEdges: return "NoEdges";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
  }
  return "UnknownError";
}

std::string normalize_word(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '_') {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

NodeId StringTable::intern(std::string_view raw) {
  std::string word = normalize_word(raw);
  if (word.empty()) throw Error(ErrorCode::InvalidArgument, "cannot intern an empty word");
  auto it = index_.find(word);
  if (it != index_.end()) return it->second;
  NodeId id = static_cast<NodeId>(words_.size());
  words_.push_back(word);
  index_.emplace(std::move(word), id);
  return id;
}

std::optional<NodeId> StringTable::find(std::string_view raw) const {
  auto it = index_.find(normalize_word(raw));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WeightedGraph WeightedGraph::from_edges(std::vector<NodeId> nodes, std::vector<Edge> edges) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  WeightedGraph g;
  g.nodes_ = std::move(nodes);

  for (auto& e : edges) {
    if (e.a == e.b) throw Error(ErrorCode::InvalidArgument, "self-loop in edge list");
    if (!(e.weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "non-positive edge weight");
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].a == edges[i - 1].a && edges[i].b == edges[i - 1].b)
      throw Error(ErrorCode::InvalidArgument, "duplicate edge in edge list");
  }

  const std::size_t n = g.nodes_.size();
  auto index_of = [&](NodeId id) -> std::size_t {
    auto it = std::lower_bound(g.nodes_.begin(), g.nodes_.end(), id);
    if (it == g.nodes_.end() || *it != id)
      throw Error(ErrorCode::InvalidArgument, "edge endpoint not in node set");
    return static_cast<std::size_t>(it - g.nodes_.begin());
  };

  std::vector<std::size_t> counts(n, 0);
  for (const auto& e : edges) {
    ++counts[index_of(e.a)];
    ++counts[index_of(e.b)];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + counts[i];
  g.adjacency_.resize(g.offsets_[n]);

  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : edges) {
    g.adjacency_[cursor[index_of(e.a)]++] = {e.b, e.weight};
    g.adjacency_[cursor[index_of(e.b)]++] = {e.a, e.weight};
    g.total_weight_ += e.weight;
  }
  g.edge_count_ = edges.size();

  for (std::size_t i = 0; i < n; ++i) {
    auto begin = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]);
    auto end = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]);
    std::sort(begin, end, [](const Neighbor& x, const Neighbor& y) { return x.id < y.id; });
  }

  g.strength_.resize(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& nb : g.neighbors_at(i)) s += nb.weight;
    g.strength_[i] = s;
  }
  return g;
}

bool WeightedGraph::has_node(NodeId id) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), id);
}

std::size_t WeightedGraph::index_of(NodeId id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end() || *it != id)
    throw Error(ErrorCode::InvalidArgument, "node not in graph");
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::span<const WeightedGraph::Neighbor> WeightedGraph::neighbors_at(std::size_t i) const {
  return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::vector<Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (const auto& nb : neighbors_at(i)) {
      if (nodes_[i] < nb.id) out.push_back({nodes_[i], nb.id, nb.weight});
    }
  }
  std::sort(out.begin(), out.end(), [](const Edge& x, const Edge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return out;
}

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::associative: return "associative";
    case LayerKind::definitional: return "definitional";
    case LayerKind::categorical: return "categorical";
  }
  return "?";
}

std::optional<LayerKind> layer_kind_from_string(std::string_view name) {
  if (name == "associative") return LayerKind::associative;
  if (name == "definitional") return LayerKind::definitional;
  if (name == "categorical") return LayerKind::categorical;
  return std::nullopt;
}

const WeightedGraph* MultilayerNetwork::layer(LayerKind kind) const {
  for (const auto& [k, g] : layers)
    if (k == kind) return &g;
  return nullptr;
}

void MultilayerNetwork::add_layer(LayerKind kind, WeightedGraph g) {
  if (layer(kind) != nullptr)
    throw Error(ErrorCode::InvalidArgument,
                std::string("duplicate layer kind: ") + to_string(kind));
  layers.emplace_back(kind, std::move(g));
}

WeightedGraph largest_connected_component(const WeightedGraph& g) {
  if (g.empty()) throw Error(ErrorCode::EmptyGraph, "largest_connected_component of empty graph");

  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> component(n, UINT32_MAX);
  std::uint32_t n_components = 0;
  std::vector<std::size_t> stack;

  for (std::size_t start = 0; start < n; ++start) {
    if (component[start] != UINT32_MAX) continue;
    const std::uint32_t c = n_components++;
    stack.push_back(start);
    component[start] = c;
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors_at(i)) {
        std::size_t j = g.index_of(nb.id);
        if (component[j] == UINT32_MAX) {
          component[j] = c;
          stack.push_back(j);
        }
      }
    }
  }

  std::vector<std::size_t> size(n_components, 0);
  for (std::size_t i = 0; i < n; ++i) ++size[component[i]];

  // Components are discovered in ascending order of their minimum NodeId, so
  // the first maximal one is the required tie-break winner.
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < n_components; ++c)
    if (size[c] > size[best]) best = c;

  std::vector<NodeId> keep;
  keep.reserve(size[best]);
  for (std::size_t i = 0; i < n; ++i)
    if (component[i] == best) keep.push_back(g.nodes()[i]);

  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (component[g.index_of(e.a)] == best) edges.push_back(e);
  }
  return WeightedGraph::from_edges(std::move(keep), std::move(edges));
}

WeightedGraph remove_idiosyncratic_edges(const WeightedGraph& g, double threshold) {
  std::vector<Edge> kept;
  for (const auto& e : g.edges())
    if (e.weight > threshold) kept.push_back(e);
  return WeightedGraph::from_edges({g.nodes().begin(), g.nodes().end()}, std::move(kept));
}

WeightedGraph restrict_to_vocabulary(const WeightedGraph& g, const StringTable& words,
                                     const Vocabulary& vocab) {
  if (vocab.empty())
    throw Error(ErrorCode::InvalidArgument, "restrict_to_vocabulary with empty vocabulary");

  std::vector<NodeId> keep;
  for (NodeId id : g.nodes())
    if (vocab.words.count(words.word(id)) > 0) keep.push_back(id);

  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (std::binary_search(keep.begin(), keep.end(), e.a) &&
        std::binary_search(keep.begin(), keep.end(), e.b))
      edges.push_back(e);
  }
  return WeightedGraph::from_edges(std::move(keep), std::move(edges));
}

WeightedGraph aggregate(const WeightedGraph& g1, const WeightedGraph& g2) {
  if (!g1.same_node_set(g2))
    throw Error(ErrorCode::UnalignedLayers, "aggregate requires identical node sets");

  std::map<std::pair<NodeId, NodeId>, double> sum;
  for (const auto& e : g1.edges()) sum[{e.a, e.b}] += e.weight;
  for (const auto& e : g2.edges()) sum[{e.a, e.b}] += e.weight;

  std::vector<Edge> edges;
  edges.reserve(sum.size());
  for (const auto& [key, w] : sum) edges.push_back({key.first, key.second, w});
  return WeightedGraph::from_edges({g1.nodes().begin(), g1.nodes().end()}, std::move(edges));
}

}  // namespace semnet
