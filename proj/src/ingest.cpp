#include "semnet/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace semnet {
namespace {

using json = nlohmann::json;

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (!cells.empty() && !cells.back().empty() && cells.back().back() == '\r')
    cells.back().pop_back();
  return cells;
}

// Maps declared column names to indices in the header; throws MissingColumns
// naming every absent column.
class ColumnMap {
 public:
  explicit ColumnMap(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) index_[normalize_word(header[i])] = i;
  }

  std::size_t require(const std::string& name) const {
    auto it = index_.find(normalize_word(name));
    if (it == index_.end())
      throw Error(ErrorCode::MissingColumns, "column '" + name + "' not found in header");
    return it->second;
  }

 private:
  std::map<std::string, std::size_t> index_;
};

std::optional<std::uint32_t> parse_u32(const std::string& cell) {
  std::string_view sv = cell;
  while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);
  while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back()))) sv.remove_suffix(1);
  if (sv.empty()) return std::nullopt;
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
  if (ec != std::errc() || ptr != sv.data() + sv.size()) return std::nullopt;
  return value;
}

// Reads the header line; throws EmptyFile when there is nothing to read.
std::vector<std::string> read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyFile, "no header row");
  return split_tsv(line);
}

std::ifstream open_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::EmptyFile, "cannot open " + path.string());
  return in;
}

}  // namespace

const char* to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::synonym: return "synonym";
    case RelationKind::antonym: return "antonym";
    case RelationKind::hyponym: return "hyponym";
    case RelationKind::hypernym: return "hypernym";
  }
  return "?";
}

std::optional<RelationKind> relation_kind_from_string(std::string_view name) {
  std::string n = normalize_word(name);
  if (n == "synonym") return RelationKind::synonym;
  if (n == "antonym") return RelationKind::antonym;
  if (n == "hyponym") return RelationKind::hyponym;
  if (n == "hypernym") return RelationKind::hypernym;
  return std::nullopt;
}

std::size_t ParseReport::skipped_total() const {
  std::size_t total = 0;
  for (const auto& [reason, n] : skipped) total += n;
  return total;
}

FormatDescriptor FormatDescriptor::load(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open format descriptor " + json_path.string());
  json doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);

  FormatDescriptor fmt;
  if (doc.contains("associations")) {
    const auto& a = doc["associations"];
    fmt.associations.cue = a.value("cue", fmt.associations.cue);
    if (a.contains("responses"))
      fmt.associations.responses = a["responses"].get<std::vector<std::string>>();
    if (a.contains("count") && !a["count"].is_null())
      fmt.associations.count = a["count"].get<std::string>();
    else if (a.contains("count"))
      fmt.associations.count = std::nullopt;
  }
  if (doc.contains("definitions")) {
    const auto& d = doc["definitions"];
    fmt.definitions.headword = d.value("headword", fmt.definitions.headword);
    fmt.definitions.sense = d.value("sense", fmt.definitions.sense);
    fmt.definitions.text = d.value("text", fmt.definitions.text);
  }
  if (doc.contains("relations")) {
    const auto& r = doc["relations"];
    fmt.relations.headword = r.value("headword", fmt.relations.headword);
    fmt.relations.sense = r.value("sense", fmt.relations.sense);
    fmt.relations.relation = r.value("relation", fmt.relations.relation);
    fmt.relations.related = r.value("related", fmt.relations.related);
  }
  return fmt;
}

std::vector<AssociationRecord> parse_associations(std::istream& in, const AssociationFormat& fmt,
                                                  ParseReport& report) {
  ColumnMap columns(read_header(in));
  const std::size_t cue_col = columns.require(fmt.cue);
  std::vector<std::size_t> response_cols;
  for (const auto& name : fmt.responses) response_cols.push_back(columns.require(name));
  std::optional<std::size_t> count_col;
  if (fmt.count) count_col = columns.require(*fmt.count);

  const bool aggregated = count_col.has_value();
  std::vector<AssociationRecord> records;
  std::map<std::pair<std::string, std::string>, std::uint64_t> trial_counts;

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++report.rows_total;
    auto cells = split_tsv(line);

    auto cell = [&](std::size_t col) -> std::string {
      return col < cells.size() ? cells[col] : std::string();
    };

    std::string cue = normalize_word(cell(cue_col));
    if (cue.empty()) {
      report.skip("empty_cue");
      continue;
    }

    if (aggregated) {
      std::string response = normalize_word(cell(response_cols.front()));
      if (response.empty()) {
        report.skip("empty_response");
        continue;
      }
      auto count = parse_u32(cell(*count_col));
      if (!count || *count == 0) {
        report.skip("bad_count");
        continue;
      }
      records.push_back({std::move(cue), std::move(response), *count});
      ++report.records_kept;
    } else {
      bool any = false;
      for (std::size_t col : response_cols) {
        std::string response = normalize_word(cell(col));
        if (response.empty()) {
          report.skip("empty_response");
          continue;
        }
        ++trial_counts[{cue, std::move(response)}];
        any = true;
      }
      if (any) ++report.records_kept;
    }
  }

  if (!aggregated) {
    for (const auto& [key, n] : trial_counts)
      records.push_back({key.first, key.second, static_cast<std::uint32_t>(n)});
  }
  if (report.rows_total == 0) throw Error(ErrorCode::EmptyFile, "no data rows");
  return records;
}

std::vector<AssociationRecord> parse_associations(const std::filesystem::path& path,
                                                  const AssociationFormat& fmt,
                                                  ParseReport& report) {
  auto in = open_file(path);
  return parse_associations(in, fmt, report);
}

std::vector<DefinitionRecord> parse_definitions(std::istream& in, const DefinitionFormat& fmt,
                                                ParseReport& report) {
  ColumnMap columns(read_header(in));
  const std::size_t head_col = columns.require(fmt.headword);
  const std::size_t sense_col = columns.require(fmt.sense);
  const std::size_t text_col = columns.require(fmt.text);

  std::vector<DefinitionRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++report.rows_total;
    auto cells = split_tsv(line);
    auto cell = [&](std::size_t col) -> std::string {
      return col < cells.size() ? cells[col] : std::string();
    };

    std::string head = normalize_word(cell(head_col));
    if (head.empty()) {
      report.skip("empty_headword");
      continue;
    }
    auto sense = parse_u32(cell(sense_col));
    if (!sense) {
      report.skip("bad_sense");
      continue;
    }
    std::string text = cell(text_col);
    if (normalize_word(text).empty()) {
      report.skip("empty_definition");
      continue;
    }
    records.push_back({std::move(head), *sense, std::move(text)});
    ++report.records_kept;
  }
  if (report.rows_total == 0) throw Error(ErrorCode::EmptyFile, "no data rows");
  return records;
}

std::vector<DefinitionRecord> parse_definitions(const std::filesystem::path& path,
                                                const DefinitionFormat& fmt, ParseReport& report) {
  auto in = open_file(path);
  return parse_definitions(in, fmt, report);
}

std::vector<RelationRecord> parse_relations(std::istream& in, const RelationFormat& fmt,
                                            ParseReport& report) {
  ColumnMap columns(read_header(in));
  const std::size_t head_col = columns.require(fmt.headword);
  const std::size_t sense_col = columns.require(fmt.sense);
  const std::size_t rel_col = columns.require(fmt.relation);
  const std::size_t related_col = columns.require(fmt.related);

  std::vector<RelationRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++report.rows_total;
    auto cells = split_tsv(line);
    auto cell = [&](std::size_t col) -> std::string {
      return col < cells.size() ? cells[col] : std::string();
    };

    std::string head = normalize_word(cell(head_col));
    if (head.empty()) {
      report.skip("empty_headword");
      continue;
    }
    auto sense = parse_u32(cell(sense_col));
    if (!sense) {
      report.skip("bad_sense");
      continue;
    }
    auto kind = relation_kind_from_string(cell(rel_col));
    if (!kind) {
      report.skip("bad_relation");
      continue;
    }
    std::string related = normalize_word(cell(related_col));
    if (related.empty()) {
      report.skip("empty_related");
      continue;
    }
    records.push_back({std::move(head), *sense, *kind, std::move(related)});
    ++report.records_kept;
  }
  if (report.rows_total == 0) throw Error(ErrorCode::EmptyFile, "no data rows");
  return records;
}

std::vector<RelationRecord> parse_relations(const std::filesystem::path& path,
                                            const RelationFormat& fmt, ParseReport& report) {
  auto in = open_file(path);
  return parse_relations(in, fmt, report);
}

void write_associations(std::ostream& out, std::span<const AssociationRecord> records) {
  out << "cue\tresponse\tcount\n";
  for (const auto& r : records) out << r.cue << '\t' << r.response << '\t' << r.count << '\n';
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  auto in = open_file(path);
  Vocabulary vocab;
  std::string line;
  while (std::getline(in, line)) {
    std::string word = normalize_word(line);
    if (!word.empty()) vocab.words.insert(std::move(word));
  }
  if (vocab.empty()) throw Error(ErrorCode::EmptyFile, "vocabulary " + path.string() + " is empty");
  return vocab;
}

std::vector<std::string> tokenize_definition(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc)) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

// Multiword phrases survive only when the whole phrase is a vocabulary entry;
// everything else multiword is dropped here (single words fall to the
// vocabulary filter later).
bool admit_word(const std::string& word, const Vocabulary& vocab, BuildReport* report) {
  if (word.find(' ') == std::string::npos) return true;
  if (vocab.words.count(word) > 0) return true;
  if (report) report->bump("multiword_not_in_vocabulary");
  return false;
}

// Shared tail of every builder: vocabulary restriction, optional
// idiosyncratic-edge removal, largest connected component.
WeightedGraph filter_chain(WeightedGraph g, const Vocabulary& vocab, const StringTable& words,
                           bool drop_idiosyncratic, BuildReport* report) {
  const std::size_t nodes_before = g.node_count();
  g = restrict_to_vocabulary(g, words, vocab);
  if (report) report->bump("nodes_outside_vocabulary", nodes_before - g.node_count());
  if (g.empty()) throw Error(ErrorCode::EmptyAfterFiltering, "no nodes left after vocabulary filter");

  if (drop_idiosyncratic) {
    const std::size_t edges_before = g.edge_count();
    g = remove_idiosyncratic_edges(g);
    if (report) report->bump("idiosyncratic_edges_removed", edges_before - g.edge_count());
  }
  if (g.edge_count() == 0) throw Error(ErrorCode::EmptyAfterFiltering, "no edges left after filtering");

  g = largest_connected_component(g);
  if (g.edge_count() == 0) throw Error(ErrorCode::EmptyAfterFiltering, "largest component has no edges");
  return g;
}

}  // namespace

WeightedGraph build_association_layer(std::span<const AssociationRecord> records,
                                      const Vocabulary& vocab, StringTable& words,
                                      BuildReport* report) {
  if (records.empty()) throw Error(ErrorCode::EmptyAfterFiltering, "no association records");

  // Directed weights first: response frequencies summed per (cue, response).
  std::map<std::pair<NodeId, NodeId>, double> directed;
  std::set<NodeId> nodes;
  for (const auto& r : records) {
    if (r.cue.empty() || r.response.empty() || r.count == 0) continue;
    if (!admit_word(r.cue, vocab, report) || !admit_word(r.response, vocab, report)) continue;
    NodeId cue = words.intern(r.cue);
    NodeId response = words.intern(r.response);
    if (cue == response) {
      if (report) report->bump("self_loops_dropped");
      continue;
    }
    nodes.insert(cue);
    nodes.insert(response);
    directed[{cue, response}] += static_cast<double>(r.count);
  }

  // Undirected collapse keeps the larger of the two directed weights.
  std::map<std::pair<NodeId, NodeId>, double> undirected;
  for (const auto& [key, w] : directed) {
    auto canon = key.first < key.second ? key : std::make_pair(key.second, key.first);
    auto [it, inserted] = undirected.emplace(canon, w);
    if (!inserted) it->second = std::max(it->second, w);
  }

  std::vector<Edge> edges;
  edges.reserve(undirected.size());
  for (const auto& [key, w] : undirected) edges.push_back({key.first, key.second, w});

  auto g = WeightedGraph::from_edges({nodes.begin(), nodes.end()}, std::move(edges));
  if (g.empty()) throw Error(ErrorCode::EmptyAfterFiltering, "no usable association records");
  return filter_chain(std::move(g), vocab, words, /*drop_idiosyncratic=*/true, report);
}

WeightedGraph build_definition_layer(std::span<const DefinitionRecord> records,
                                     const Vocabulary& vocab, StringTable& words,
                                     BuildReport* report) {
  if (records.empty()) throw Error(ErrorCode::EmptyAfterFiltering, "no definition records");

  std::set<std::pair<NodeId, NodeId>> edge_set;
  std::set<NodeId> nodes;
  for (const auto& r : records) {
    if (r.headword.empty()) continue;
    if (!admit_word(r.headword, vocab, report)) continue;
    NodeId head = words.intern(r.headword);
    nodes.insert(head);
    for (const auto& token : tokenize_definition(r.text)) {
      NodeId tok = words.intern(token);
      if (tok == head) {
        if (report) report->bump("self_loops_dropped");
        continue;
      }
      nodes.insert(tok);
      edge_set.insert(head < tok ? std::make_pair(head, tok) : std::make_pair(tok, head));
    }
  }

  std::vector<Edge> edges;
  edges.reserve(edge_set.size());
  for (const auto& [a, b] : edge_set) edges.push_back({a, b, 1.0});

  auto g = WeightedGraph::from_edges({nodes.begin(), nodes.end()}, std::move(edges));
  if (g.empty()) throw Error(ErrorCode::EmptyAfterFiltering, "no usable definition records");
  return filter_chain(std::move(g), vocab, words, /*drop_idiosyncratic=*/false, report);
}

WeightedGraph build_relation_layer(std::span<const RelationRecord> records,
                                   const Vocabulary& vocab, StringTable& words,
                                   BuildReport* report) {
  if (records.empty()) throw Error(ErrorCode::EmptyAfterFiltering, "no relation records");

  std::set<std::pair<NodeId, NodeId>> edge_set;
  std::set<NodeId> nodes;
  for (const auto& r : records) {
    if (r.headword.empty() || r.related.empty()) continue;
    if (!admit_word(r.headword, vocab, report) || !admit_word(r.related, vocab, report)) continue;
    NodeId head = words.intern(r.headword);
    NodeId related = words.intern(r.related);
    if (head == related) {
      if (report) report->bump("self_loops_dropped");
      continue;
    }
    nodes.insert(head);
    nodes.insert(related);
    auto canon = head < related ? std::make_pair(head, related) : std::make_pair(related, head);
    if (edge_set.insert(canon).second && report)
      report->bump(std::string("edges_") + to_string(r.relation));
  }

  std::vector<Edge> edges;
  edges.reserve(edge_set.size());
  for (const auto& [a, b] : edge_set) edges.push_back({a, b, 1.0});

  auto g = WeightedGraph::from_edges({nodes.begin(), nodes.end()}, std::move(edges));
  if (g.empty()) throw Error(ErrorCode::EmptyAfterFiltering, "no usable relation records");
  return filter_chain(std::move(g), vocab, words, /*drop_idiosyncratic=*/false, report);
}

}  // namespace semnet
