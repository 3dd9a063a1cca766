#include "semnet/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

namespace semnet {

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

void write_edge_list(std::ostream& out, const WeightedGraph& g, const StringTable& words) {
  struct Row {
    std::string a, b;
    double w;
  };
  std::vector<Row> rows;
  rows.reserve(g.edge_count());
  for (const auto& e : g.edges()) {
    std::string wa = words.word(e.a);
    std::string wb = words.word(e.b);
    if (wb < wa) std::swap(wa, wb);
    rows.push_back({std::move(wa), std::move(wb), e.weight});
  }
  std::sort(rows.begin(), rows.end(),
            [](const Row& x, const Row& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });

  out << "#nodes " << g.node_count() << '\n';
  for (const auto& r : rows) out << r.a << '\t' << r.b << '\t' << format_double(r.w) << '\n';
}

void write_edge_list(const std::filesystem::path& path, const WeightedGraph& g,
                     const StringTable& words) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::BadGraphFile, "cannot write " + path.string());
  write_edge_list(out, g, words);
}

WeightedGraph read_edge_list(std::istream& in, StringTable& words) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::BadGraphFile, "empty graph file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::size_t declared = 0;
  {
    std::istringstream header(line);
    std::string tag;
    header >> tag >> declared;
    if (tag != "#nodes" || header.fail())
      throw Error(ErrorCode::BadGraphFile, "bad header: " + line);
  }

  std::vector<Edge> edges;
  std::set<NodeId> nodes;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw Error(ErrorCode::BadGraphFile, "line " + std::to_string(line_no) + ": expected 3 columns");

    std::string wa = line.substr(0, t1);
    std::string wb = line.substr(t1 + 1, t2 - t1 - 1);
    std::string ws = line.substr(t2 + 1);
    if (wa.empty() || wb.empty())
      throw Error(ErrorCode::BadGraphFile, "line " + std::to_string(line_no) + ": empty word");

    double w = 0.0;
    auto [ptr, ec] = std::from_chars(ws.data(), ws.data() + ws.size(), w);
    if (ec != std::errc() || ptr != ws.data() + ws.size() || !(w > 0.0))
      throw Error(ErrorCode::BadGraphFile,
                  "line " + std::to_string(line_no) + ": bad weight '" + ws + "'");

    NodeId a = words.intern(wa);
    NodeId b = words.intern(wb);
    if (a == b)
      throw Error(ErrorCode::BadGraphFile, "line " + std::to_string(line_no) + ": self loop");
    nodes.insert(a);
    nodes.insert(b);
    edges.push_back({a, b, w});
  }

  if (edges.empty()) throw Error(ErrorCode::NoEdges, "graph file has no edges");
  if (nodes.size() != declared)
    throw Error(ErrorCode::BadGraphFile, "header declares " + std::to_string(declared) +
                                             " nodes but rows name " + std::to_string(nodes.size()));
  return WeightedGraph::from_edges({nodes.begin(), nodes.end()}, std::move(edges));
}

WeightedGraph read_edge_list(const std::filesystem::path& path, StringTable& words) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadGraphFile, "cannot open " + path.string());
  return read_edge_list(in, words);
}

LayerStats compute_stats(const WeightedGraph& g) {
  LayerStats s;
  s.nodes = g.node_count();
  s.edges = g.edge_count();
  if (s.nodes > 1) {
    const double v = static_cast<double>(s.nodes);
    const double e = static_cast<double>(s.edges);
    s.density = 2.0 * e / (v * (v - 1.0));
    s.mean_degree = 2.0 * e / v;
  }
  return s;
}

}  // namespace semnet
