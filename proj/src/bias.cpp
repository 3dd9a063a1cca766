#include "semnet/bias.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "semnet/default_lexicon.hpp"

namespace semnet {
namespace {

using json = nlohmann::json;

Lexicon lexicon_from_json(const json& doc, const std::string& origin) {
  Lexicon lex;
  if (!doc.contains("prime_pairs") || !doc.contains("targets"))
    throw Error(ErrorCode::InvalidConfig, origin + ": lexicon needs prime_pairs and targets");

  for (const auto& pair : doc["prime_pairs"]) {
    PrimePair p;
    p.female = normalize_word(pair.at("female").get<std::string>());
    p.male = normalize_word(pair.at("male").get<std::string>());
    lex.prime_pairs.push_back(std::move(p));
  }
  for (const auto& entry : doc["targets"]) {
    TargetEntry t;
    t.word = normalize_word(entry.at("word").get<std::string>());
    auto topic = topic_from_string(entry.at("topic").get<std::string>());
    auto gender = gender_from_string(entry.at("gender").get<std::string>());
    if (!topic || !gender)
      throw Error(ErrorCode::InvalidConfig, origin + ": bad topic/gender for '" + t.word + "'");
    t.topic = *topic;
    t.gender = *gender;
    lex.targets.push_back(std::move(t));
  }
  lex.validate();
  return lex;
}

}  // namespace

const char* to_string(Topic t) {
  switch (t) {
    case Topic::traits: return "traits";
    case Topic::home_career: return "home_career";
    case Topic::art_science: return "art_science";
    case Topic::professions: return "professions";
  }
  return "?";
}

const char* to_string(Gender g) { return g == Gender::female ? "female" : "male"; }

std::optional<Topic> topic_from_string(std::string_view name) {
  std::string n = normalize_word(name);
  if (n == "traits") return Topic::traits;
  if (n == "home career" || n == "home_career") return Topic::home_career;
  if (n == "art science" || n == "art_science") return Topic::art_science;
  if (n == "professions") return Topic::professions;
  return std::nullopt;
}

std::optional<Gender> gender_from_string(std::string_view name) {
  std::string n = normalize_word(name);
  if (n == "female" || n == "f") return Gender::female;
  if (n == "male" || n == "m") return Gender::male;
  return std::nullopt;
}

const Lexicon& Lexicon::default_lexicon() {
  static const Lexicon lex = lexicon_from_json(json::parse(kDefaultLexiconJson), "default lexicon");
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open lexicon " + path.string());
  return lexicon_from_json(json::parse(in, nullptr, true, /*ignore_comments=*/true),
                           path.string());
}

void Lexicon::validate() const {
  if (prime_pairs.empty()) throw Error(ErrorCode::InvalidConfig, "lexicon has no prime pairs");
  if (targets.empty()) throw Error(ErrorCode::InvalidConfig, "lexicon has no targets");

  std::set<std::string> seen;
  for (const auto& p : prime_pairs) {
    if (p.female.empty() || p.male.empty() || p.female == p.male)
      throw Error(ErrorCode::InvalidConfig, "bad prime pair (" + p.female + ", " + p.male + ")");
    if (!seen.insert(p.female).second || !seen.insert(p.male).second)
      throw Error(ErrorCode::InvalidConfig, "duplicate prime word");
  }
  std::set<std::string> target_seen;
  for (const auto& t : targets) {
    if (t.word.empty()) throw Error(ErrorCode::InvalidConfig, "empty target word");
    if (!target_seen.insert(t.word).second)
      throw Error(ErrorCode::InvalidConfig, "duplicate target word '" + t.word + "'");
    if (seen.count(t.word))
      throw Error(ErrorCode::InvalidConfig, "word '" + t.word + "' is both prime and target");
  }
}

std::vector<std::string> Lexicon::prime_words() const {
  std::vector<std::string> words;
  words.reserve(prime_pairs.size() * 2);
  for (const auto& p : prime_pairs) words.push_back(p.female);
  for (const auto& p : prime_pairs) words.push_back(p.male);
  return words;
}

std::vector<std::string> Lexicon::target_words() const {
  std::vector<std::string> words;
  words.reserve(targets.size());
  for (const auto& t : targets) words.push_back(t.word);
  return words;
}

ActivationMatrix normalize(const ActivationMatrix& m) {
  if (m.normalized) throw Error(ErrorCode::InvalidArgument, "matrix already normalized");

  ActivationMatrix out;
  out.primes = m.primes;
  out.missing_primes = m.missing_primes;
  out.missing_targets = m.missing_targets;
  out.params = m.params;
  out.normalized = true;

  std::vector<Eigen::Index> kept;
  for (Eigen::Index col = 0; col < m.values.cols(); ++col) {
    if (m.values.col(col).sum() > 0.0) {
      kept.push_back(col);
      out.targets.push_back(m.targets[static_cast<std::size_t>(col)]);
    } else {
      out.zero_targets.push_back(m.targets[static_cast<std::size_t>(col)]);
    }
  }

  out.values.resize(m.values.rows(), static_cast<Eigen::Index>(kept.size()));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(kept.size()); ++j) {
    const auto col = m.values.col(kept[static_cast<std::size_t>(j)]);
    out.values.col(j) = col / col.sum();
  }
  return out;
}

std::vector<double> paired_differences(const ActivationMatrix& m, const Lexicon& lex, Topic topic,
                                       Gender side) {
  if (!m.normalized) throw Error(ErrorCode::InvalidArgument, "matrix must be normalized first");

  std::map<std::string, Eigen::Index> prime_row;
  for (std::size_t i = 0; i < m.primes.size(); ++i)
    prime_row[m.primes[i]] = static_cast<Eigen::Index>(i);
  std::map<std::string, Eigen::Index> target_col;
  for (std::size_t j = 0; j < m.targets.size(); ++j)
    target_col[m.targets[j]] = static_cast<Eigen::Index>(j);

  std::vector<double> diffs;
  for (const auto& t : lex.targets) {
    if (t.topic != topic || t.gender != side) continue;
    auto col = target_col.find(t.word);
    if (col == target_col.end()) continue;
    for (const auto& pair : lex.prime_pairs) {
      auto f = prime_row.find(pair.female);
      auto mrow = prime_row.find(pair.male);
      if (f == prime_row.end() || mrow == prime_row.end()) continue;
      const double act_f = m.values(f->second, col->second);
      const double act_m = m.values(mrow->second, col->second);
      diffs.push_back(side == Gender::female ? act_f - act_m : act_m - act_f);
    }
  }
  if (diffs.empty())
    throw Error(ErrorCode::NoUsablePairs, std::string("no usable prime-target pairs for ") +
                                              to_string(topic) + "/" + to_string(side));
  return diffs;
}

namespace {

// Two-sided exact p over all 2^n sign assignments, computed by the shift
// algorithm on integer doubled ranks (averaged tie ranks double to integers).
double exact_p_value(const std::vector<double>& ranks, double w_plus) {
  const std::size_t n = ranks.size();
  std::vector<std::size_t> doubled(n);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
    total += doubled[i];
  }

  std::vector<std::uint64_t> count(total + 1, 0);
  count[0] = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = total + 1; s-- > doubled[i];) count[s] += count[s - doubled[i]];

  const auto w2 = static_cast<std::size_t>(std::llround(2.0 * w_plus));
  std::uint64_t at_most = 0, at_least = 0;
  for (std::size_t s = 0; s <= total; ++s) {
    if (s <= w2) at_most += count[s];
    if (s >= w2) at_least += count[s];
  }
  const double denom = std::ldexp(1.0, static_cast<int>(n));  // 2^n
  const double p = 2.0 * static_cast<double>(std::min(at_most, at_least)) / denom;
  return std::min(1.0, p);
}

double normal_p_value(const std::vector<double>& ranks, double w_plus) {
  const double n = static_cast<double>(ranks.size());
  const double mu = n * (n + 1.0) / 4.0;
  double sigma2 = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;

  // Tie correction: subtract sum(t^3 - t)/48 over groups of equal ranks.
  std::map<double, std::size_t> groups;
  for (double r : ranks) ++groups[r];
  for (const auto& [rank, t] : groups) {
    const double td = static_cast<double>(t);
    sigma2 -= (td * td * td - td) / 48.0;
  }
  if (!(sigma2 > 0.0)) return 1.0;  // all ranks tied symmetric

  double delta = w_plus - mu;
  if (delta > 0.5)
    delta -= 0.5;  // continuity correction toward the mean
  else if (delta < -0.5)
    delta += 0.5;
  else
    delta = 0.0;
  const double z = delta / std::sqrt(sigma2);
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace

EffectSize wilcoxon_signed_rank(std::span<const double> diffs) {
  EffectSize e;
  std::vector<double> nonzero;
  for (double d : diffs) {
    if (d == 0.0)
      ++e.n_zero_dropped;
    else
      nonzero.push_back(d);
  }
  if (nonzero.empty()) {
    e.degenerate = true;  // AllZeroDifferences
    e.r = 0.0;
    e.p_value = 1.0;
    return e;
  }

  const std::size_t n = nonzero.size();
  e.n_pairs = n;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(nonzero[a]) < std::abs(nonzero[b]);
  });

  // Average ranks across runs of equal magnitude.
  std::vector<double> rank(n, 0.0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(nonzero[order[j]]) == std::abs(nonzero[order[i]])) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg;
    i = j;
  }

  std::vector<double> ranks_sorted;
  ranks_sorted.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (nonzero[i] > 0.0)
      e.w_plus += rank[i];
    else
      e.w_minus += rank[i];
    ranks_sorted.push_back(rank[i]);
  }

  e.r = (e.w_plus - e.w_minus) / (e.w_plus + e.w_minus);
  e.p_value = n <= 20 ? exact_p_value(ranks_sorted, e.w_plus)
                      : normal_p_value(ranks_sorted, e.w_plus);
  return e;
}

std::vector<BiasCell> layer_bias_cells(const ActivationMatrix& normalized, const Lexicon& lex) {
  if (!normalized.normalized)
    throw Error(ErrorCode::InvalidArgument, "bias cells require a normalized matrix");

  std::vector<BiasCell> cells;
  for (Gender side : {Gender::female, Gender::male}) {
    std::vector<double> pooled;
    double topic_r_sum = 0.0;
    std::size_t topic_r_count = 0;

    for (Topic topic : kAllTopics) {
      BiasCell cell;
      cell.topic = topic;
      cell.side = side;
      try {
        auto diffs = paired_differences(normalized, lex, topic, side);
        pooled.insert(pooled.end(), diffs.begin(), diffs.end());
        cell.effect = wilcoxon_signed_rank(diffs);
        cell.usable = true;
        topic_r_sum += cell.effect.r;
        ++topic_r_count;
      } catch (const Error& err) {
        cell.note = err.what();
      }
      cells.push_back(std::move(cell));
    }

    BiasCell aggregate;
    aggregate.side = side;
    if (pooled.empty()) {
      aggregate.note = "no usable prime-target pairs in any topic";
    } else {
      aggregate.effect = wilcoxon_signed_rank(pooled);
      aggregate.usable = true;
      aggregate.mean_topic_r =
          topic_r_count > 0 ? topic_r_sum / static_cast<double>(topic_r_count) : 0.0;
    }
    cells.push_back(std::move(aggregate));
  }
  return cells;
}

}  // namespace semnet
