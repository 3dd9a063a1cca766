// Edge-list serialization and small formatting helpers shared by the writers.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "semnet/graph.hpp"

namespace semnet {

// Shortest decimal string that round-trips the double (std::to_chars).
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view data);

// Format: header `#nodes N`, then `word1<TAB>word2<TAB>weight` rows, each row
// and the row list in lexicographic word order.
void write_edge_list(std::ostream& out, const WeightedGraph& g, const StringTable& words);
void write_edge_list(const std::filesystem::path& path, const WeightedGraph& g,
                     const StringTable& words);

WeightedGraph read_edge_list(std::istream& in, StringTable& words);
WeightedGraph read_edge_list(const std::filesystem::path& path, StringTable& words);

struct LayerStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double density = 0.0;      // 2|E| / (|V|(|V|-1))
  double mean_degree = 0.0;  // 2|E| / |V|
};

LayerStats compute_stats(const WeightedGraph& g);

}  // namespace semnet
