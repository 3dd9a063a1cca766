// ingest.hpp -- TSV parsers for the three source-data kinds and the layer
// builders that turn parsed records into filtered graph layers.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semnet/graph.hpp"

namespace semnet {

struct AssociationRecord {
  std::string cue;
  std::string response;
  std::uint32_t count = 1;  // response frequency
};

struct DefinitionRecord {
  std::string headword;
  std::uint32_t sense = 0;
  std::string text;
};

enum class RelationKind { synonym, antonym, hyponym, hypernym };

const char* to_string(RelationKind kind);
std::optional<RelationKind> relation_kind_from_string(std::string_view name);

struct RelationRecord {
  std::string headword;
  std::uint32_t sense = 0;
  RelationKind relation = RelationKind::synonym;
  std::string related;
};

// Counts of rows kept and skipped (by reason), emitted next to every build
// output so filtering is auditable.
struct ParseReport {
  std::size_t rows_total = 0;
  std::size_t records_kept = 0;
  std::map<std::string, std::size_t> skipped;  // reason -> count

  void skip(const std::string& reason) { ++skipped[reason]; }
  std::size_t skipped_total() const;
};

// Logical-to-physical column mapping, so SWOW-style, LWOW-style, and
// synthetic fixtures all load through one parser. When `count` is set the
// file carries aggregated rows (cue, response, count); otherwise each row is
// one participant trial and every non-empty response column is counted.
struct AssociationFormat {
  std::string cue = "cue";
  std::vector<std::string> responses = {"response"};
  std::optional<std::string> count = "count";
};

struct DefinitionFormat {
  std::string headword = "headword";
  std::string sense = "sense";
  std::string text = "definition";
};

struct RelationFormat {
  std::string headword = "headword";
  std::string sense = "sense";
  std::string relation = "relation";
  std::string related = "related";
};

struct FormatDescriptor {
  AssociationFormat associations;
  DefinitionFormat definitions;
  RelationFormat relations;

  static FormatDescriptor load(const std::filesystem::path& json_path);
};

// ---- parsers ----------------------------------------------------------------
// All parsers expect UTF-8 tab-separated values with a header row. Malformed
// rows are skipped and tallied in the report, never fatal; a missing declared
// column or an empty file is.

std::vector<AssociationRecord> parse_associations(std::istream& in, const AssociationFormat& fmt,
                                                  ParseReport& report);
std::vector<AssociationRecord> parse_associations(const std::filesystem::path& path,
                                                  const AssociationFormat& fmt,
                                                  ParseReport& report);

std::vector<DefinitionRecord> parse_definitions(std::istream& in, const DefinitionFormat& fmt,
                                                ParseReport& report);
std::vector<DefinitionRecord> parse_definitions(const std::filesystem::path& path,
                                                const DefinitionFormat& fmt, ParseReport& report);

std::vector<RelationRecord> parse_relations(std::istream& in, const RelationFormat& fmt,
                                            ParseReport& report);
std::vector<RelationRecord> parse_relations(const std::filesystem::path& path,
                                            const RelationFormat& fmt, ParseReport& report);

// Serializes aggregated records in the canonical column order; parsing the
// result yields the same record multiset.
void write_associations(std::ostream& out, std::span<const AssociationRecord> records);

// One lemma per line; normalized and deduplicated.
Vocabulary load_vocabulary(const std::filesystem::path& path);

// Lowercase alphabetic tokens, split on every non-alphabetic character.
// Order and duplicates preserved; deduplication happens at edge creation.
std::vector<std::string> tokenize_definition(std::string_view text);

// ---- layer builders ----------------------------------------------------------

// Extra tallies produced while building (skipped self-loops, multiword drops,
// out-of-vocabulary words); merged into the agent's parse report.
struct BuildReport {
  std::map<std::string, std::size_t> counts;
  void bump(const std::string& key, std::size_t n = 1) { counts[key] += n; }
};

// Free-association layer: weights are summed response frequencies,
// bidirectional cue/response pairs collapse to the larger weight, then the
// filter chain vocabulary -> idiosyncratic-edge removal -> largest component.
WeightedGraph build_association_layer(std::span<const AssociationRecord> records,
                                      const Vocabulary& vocab, StringTable& words,
                                      BuildReport* report = nullptr);

// Definitions layer: headword connected to every token of every sense,
// unweighted; vocabulary filter and largest component only (no idiosyncratic
// removal -- there are no frequencies to threshold).
WeightedGraph build_definition_layer(std::span<const DefinitionRecord> records,
                                     const Vocabulary& vocab, StringTable& words,
                                     BuildReport* report = nullptr);

// Categorical-relations layer: headword connected to each related word for
// all senses, unweighted. Relation kinds are tallied per edge for diagnostics
// but carry no weight downstream.
WeightedGraph build_relation_layer(std::span<const RelationRecord> records,
                                   const Vocabulary& vocab, StringTable& words,
                                   BuildReport* report = nullptr);

}  // namespace semnet
