// graph.hpp -- interned-word weighted graphs and the multilayer container.
//
// All graphs are undirected, loop-free, positively weighted, and immutable
// after construction; every operation returns a new graph. Node identities
// are indices into a per-network string table, so the same word keeps the
// same NodeId across layers of one network.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "semnet/errors.hpp"

namespace semnet {

using NodeId = std::uint32_t;

/// Canonical word form: trimmed, lowercased (ASCII), underscores treated as
// spaces, internal whitespace runs collapsed to a single space. Multiword
// lemmas ("police officer") therefore match WordNet-style exports that use
// either spaces or underscores.
std::string normalize_word(std::string_view raw);

class StringTable {
 public:
  // Interns the normalized form of `raw`; returns the existing id if present.
  NodeId intern(std::string_view raw);
  // Lookup without inserting. Case-insensitive via normalization.
  std::optional<NodeId> find(std::string_view raw) const;
  const std::string& word(NodeId id) const { return words_.at(id); }
  std::size_t size() const { return words_.size(); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, NodeId> index_;
};

struct Edge {
  NodeId a;
  NodeId b;
  double weight;

  bool operator==(const Edge&) const = default;
};

class WeightedGraph {
 public:
  struct Neighbor {
    NodeId id;
    double weight;
  };

  WeightedGraph() = default;

  // Builds a graph from a node set and an edge list. Edge endpoints may come
  // in either orientation; they are stored canonically (a < b). Throws on
  // self-loops, duplicate edges, non-positive weights, or endpoints missing
  // from `nodes` (builders sanitize their input before calling this).
  static WeightedGraph from_edges(std::vector<NodeId> nodes, std::vector<Edge> edges);

  std::span<const NodeId> nodes() const { return nodes_; }  // sorted ascending
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool empty() const { return nodes_.empty(); }

  bool has_node(NodeId id) const;
  // Position of `id` in nodes(); throws if absent.
  std::size_t index_of(NodeId id) const;

  // Neighbors sorted by id. `i` is a position into nodes().
  std::span<const Neighbor> neighbors_at(std::size_t i) const;
  std::span<const Neighbor> neighbors(NodeId id) const { return neighbors_at(index_of(id)); }

  std::size_t degree_at(std::size_t i) const { return neighbors_at(i).size(); }
  double strength_at(std::size_t i) const { return strength_[i]; }  // weighted degree

  // Sum of edge weights (each undirected edge counted once).
  double total_weight() const { return total_weight_; }

  // Canonical edge list, sorted by (a, b) with a < b.
  std::vector<Edge> edges() const;

  bool same_node_set(const WeightedGraph& other) const { return nodes_ == other.nodes_; }

 private:
  std::vector<NodeId> nodes_;             // sorted
  std::vector<std::size_t> offsets_;      // CSR offsets, size nodes_+1
  std::vector<Neighbor> adjacency_;       // sorted by id within each node
  std::vector<double> strength_;
  std::size_t edge_count_ = 0;
  double total_weight_ = 0.0;
};

// A word set used to restrict graphs (typically a WordNet lemma export).
struct Vocabulary {
  std::unordered_set<std::string> words;  // normalized forms

  bool contains(std::string_view raw) const { return words.count(normalize_word(raw)) > 0; }
  bool empty() const { return words.empty(); }
};

enum class LayerKind { associative, definitional, categorical };

const char* to_string(LayerKind kind);
std::optional<LayerKind> layer_kind_from_string(std::string_view name);

// One agent's multilayer network. Layers share the string table, so a word
// has a single NodeId across layers even when absent from some of them.
struct MultilayerNetwork {
  std::string agent;
  StringTable words;
  std::vector<std::pair<LayerKind, WeightedGraph>> layers;

  const WeightedGraph* layer(LayerKind kind) const;
  void add_layer(LayerKind kind, WeightedGraph g);  // throws if kind already present
};

// ---- operations ------------------------------------------------------------

// Induced subgraph on the largest connected component (isolated nodes count
// as size-1 components). Ties break toward the component containing the
// smallest NodeId. Node identities are preserved.
WeightedGraph largest_connected_component(const WeightedGraph& g);

// Drops every edge with weight <= threshold. Nodes are retained; extracting
// the connected component is a separate step.
WeightedGraph remove_idiosyncratic_edges(const WeightedGraph& g, double threshold = 1.0);

// Induced subgraph on nodes whose word is in `vocab`.
WeightedGraph restrict_to_vocabulary(const WeightedGraph& g, const StringTable& words,
                                     const Vocabulary& vocab);

// Edge-wise weight sum of two layers aligned on the same node set.
WeightedGraph aggregate(const WeightedGraph& g1, const WeightedGraph& g2);

}  // namespace semnet
