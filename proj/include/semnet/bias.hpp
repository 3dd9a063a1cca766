// Stereotype-bias measurement: activation normalization, stereotype-
// consistent paired differences, and Wilcoxon rank-biserial effect sizes.
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semnet/activation.hpp"

namespace semnet {

enum class Topic { traits, home_career, art_science, professions };
enum class Gender { female, male };

const char* to_string(Topic t);
const char* to_string(Gender g);
std::optional<Topic> topic_from_string(std::string_view name);
std::optional<Gender> gender_from_string(std::string_view name);

inline constexpr Topic kAllTopics[] = {Topic::traits, Topic::home_career, Topic::art_science,
                                       Topic::professions};

struct PrimePair {
  std::string female, male;
};

struct TargetEntry {
  std::string word;
  Topic topic;
  Gender gender;
};

struct Lexicon {
  std::vector<PrimePair> prime_pairs;
  std::vector<TargetEntry> targets;

  // Built-in lexicon: 5 prime pairs, 172 targets (86 per gender) across the
  // four stereotype topics.
  static const Lexicon& default_lexicon();
  static Lexicon load(const std::filesystem::path& path);

  void validate() const;  // throws InvalidConfig
  std::vector<std::string> prime_words() const;  // female primes then male primes
  std::vector<std::string> target_words() const;
};

// Divides each target column by its sum over present primes so a target's
// activation becomes a distribution over primes; all-zero columns are
// excluded and recorded in zero_targets.
ActivationMatrix normalize(const ActivationMatrix& m);

// Stereotype-consistent minus inconsistent differences for one topic/side:
// female-stereotyped targets use act(female prime) - act(male prime), male-
// stereotyped targets the reverse, one value per (target, prime pair) with
// everything present. Positive = stereotype-consistent.
std::vector<double> paired_differences(const ActivationMatrix& m, const Lexicon& lex, Topic topic,
                                       Gender side);

struct EffectSize {
  double r = 0.0;  // rank-biserial correlation, in [-1, 1]
  std::size_t n_pairs = 0;
  std::size_t n_zero_dropped = 0;
  double p_value = 1.0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  bool degenerate = false;  // every difference was exactly zero
};

// Signed-rank test with average ranks for ties; exact two-sided p by
// enumeration for n <= 20, normal approximation with tie and continuity
// corrections above.
EffectSize wilcoxon_signed_rank(std::span<const double> diffs);

struct BiasCell {
  std::optional<Topic> topic;  // nullopt = aggregate over all four topics
  Gender side = Gender::female;
  EffectSize effect;
  bool usable = false;
  std::string note;          // why the cell is missing, when !usable
  double mean_topic_r = 0.0; // aggregate cells: mean r over usable topics
};

// The 10 cells for one normalized layer matrix: 4 topics x 2 sides plus the
// pooled aggregate per side (secondary column: mean per-topic r).
std::vector<BiasCell> layer_bias_cells(const ActivationMatrix& normalized, const Lexicon& lex);

}  // namespace semnet
