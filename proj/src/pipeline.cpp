#include "semnet/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semnet/bias.hpp"
#include "semnet/graph_io.hpp"
#include "semnet/parallel.hpp"
#include "semnet/reducibility.hpp"
#include "semnet/report.hpp"

namespace semnet {
namespace {

using json = nlohmann::ordered_json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

json load_json_file(const std::filesystem::path& path, ErrorCode code) {
  std::ifstream in(path);
  if (!in) throw Error(code, "cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(code, path.string() + ": " + e.what());
  }
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// Collects written files and their content hashes for the run manifest, so
// re-runs are byte-comparable end to end.
class OutputDir {
 public:
  explicit OutputDir(const std::filesystem::path& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + (dir_ / name).string());
    out << content;
    hashes_[name] = fnv1a64(content);
  }

  void write_manifest(const std::string& command, const RunConfig& config, json options) {
    json doc;
    doc["command"] = command;
    doc["seed"] = config.seed;
    doc["config"] = config_snapshot(config);
    doc["options"] = std::move(options);
    json outputs = json::array();
    for (const auto& [name, hash] : hashes_) {
      json entry;
      entry["file"] = name;
      entry["fnv1a64"] = hash_hex(hash);
      outputs.push_back(std::move(entry));
    }
    doc["outputs"] = std::move(outputs);
    write("manifest_" + command + ".json", doc.dump(2) + "\n");
  }

 private:
  static std::string raw_or(const std::string& raw, const std::filesystem::path& p) {
    return raw.empty() ? p.string() : raw;
  }

  static json config_snapshot(const RunConfig& c) {
    json agents = json::array();
    for (const auto& a : c.agents) {
      json agent;
      agent["name"] = a.name;
      agent["associations"] = raw_or(a.associations_raw, a.associations);
      agent["definitions"] = raw_or(a.definitions_raw, a.definitions);
      agent["relations"] = raw_or(a.relations_raw, a.relations);
      if (a.format) agent["format"] = raw_or(a.format_raw, *a.format);
      agents.push_back(std::move(agent));
    }
    json cfg;
    cfg["agents"] = std::move(agents);
    cfg["vocabulary"] = raw_or(c.vocabulary_raw, c.vocabulary);
    if (c.format) cfg["format"] = raw_or(c.format_raw, *c.format);
    if (c.lexicon) cfg["lexicon"] = raw_or(c.lexicon_raw, *c.lexicon);
    return cfg;
  }

  std::filesystem::path dir_;
  std::map<std::string, std::uint64_t> hashes_;  // name -> content hash
};

json options_snapshot(const RunConfig& c) {
  json opts;
  opts["exact_eigen_max"] = c.exact_eigen_max;
  opts["diameter_mode"] = c.diameter_mode == DiameterMode::exact ? "exact" : "approx";
  opts["slq"] = {{"probes", c.slq_probes}, {"depth", c.slq_depth}};
  json spread = json::object();
  if (c.initial_activation) spread["initial_activation"] = *c.initial_activation;
  if (c.time_steps) spread["time_steps"] = *c.time_steps;
  if (c.retention) spread["retention"] = *c.retention;
  if (c.decay) spread["decay"] = *c.decay;
  if (c.suppress) spread["suppress"] = *c.suppress;
  opts["spread_overrides"] = std::move(spread);
  return opts;
}

std::string layer_file(const std::string& agent, LayerKind kind) {
  return "graph_" + agent + "_" + to_string(kind) + ".tsv";
}

FormatDescriptor format_for(const RunConfig& c, const AgentConfig& agent) {
  if (agent.format) return FormatDescriptor::load(*agent.format);
  if (c.format) return FormatDescriptor::load(*c.format);
  return {};
}

const Lexicon& lexicon_for(const RunConfig& c, Lexicon& storage) {
  if (!c.lexicon) return Lexicon::default_lexicon();
  storage = Lexicon::load(*c.lexicon);
  return storage;
}

template <class Fn>
auto with_file_context(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

json parse_report_json(const ParseReport& r) {
  json doc;
  doc["rows_total"] = r.rows_total;
  doc["records_kept"] = r.records_kept;
  doc["skipped"] = json(r.skipped);
  return doc;
}

struct BuiltAgent {
  MultilayerNetwork net;
  json report;
};

BuiltAgent build_agent(const RunConfig& c, const AgentConfig& agent, const Vocabulary& vocab) {
  const FormatDescriptor fmt = format_for(c, agent);
  BuiltAgent out;
  out.net.agent = agent.name;

  ParseReport assoc_pr, def_pr, rel_pr;
  auto assoc = with_file_context(agent.associations, [&] {
    return parse_associations(agent.associations, fmt.associations, assoc_pr);
  });
  auto defs = with_file_context(agent.definitions, [&] {
    return parse_definitions(agent.definitions, fmt.definitions, def_pr);
  });
  auto rels = with_file_context(agent.relations, [&] {
    return parse_relations(agent.relations, fmt.relations, rel_pr);
  });

  BuildReport assoc_br, def_br, rel_br;
  out.net.add_layer(LayerKind::associative, with_file_context(agent.associations, [&] {
                      return build_association_layer(assoc, vocab, out.net.words, &assoc_br);
                    }));
  out.net.add_layer(LayerKind::definitional, with_file_context(agent.definitions, [&] {
                      return build_definition_layer(defs, vocab, out.net.words, &def_br);
                    }));
  out.net.add_layer(LayerKind::categorical, with_file_context(agent.relations, [&] {
                      return build_relation_layer(rels, vocab, out.net.words, &rel_br);
                    }));

  json parse;
  parse["associations"] = parse_report_json(assoc_pr);
  parse["definitions"] = parse_report_json(def_pr);
  parse["relations"] = parse_report_json(rel_pr);
  json build;
  build["associative"] = json(assoc_br.counts);
  build["definitional"] = json(def_br.counts);
  build["categorical"] = json(rel_br.counts);
  out.report["parse"] = std::move(parse);
  out.report["build"] = std::move(build);
  return out;
}

std::string stats_csv(const std::vector<MultilayerNetwork>& nets) {
  std::ostringstream out;
  out << "agent,layer,nodes,edges,density,mean_degree\n";
  for (const auto& net : nets)
    for (const auto& [kind, layer] : net.layers) {
      LayerStats s = compute_stats(layer);
      out << net.agent << ',' << to_string(kind) << ',' << s.nodes << ',' << s.edges << ','
          << fixed4(s.density) << ',' << std::llround(s.mean_degree) << '\n';
    }
  return out.str();
}

MultilayerNetwork read_multilayer(const std::filesystem::path& out_dir, const std::string& agent) {
  MultilayerNetwork net;
  net.agent = agent;
  for (LayerKind kind : kLayerOrder) {
    const auto path = out_dir / layer_file(agent, kind);
    if (!std::filesystem::exists(path))
      throw Error(ErrorCode::BadGraphFile, path.string() + " not found; run 'build' first");
    net.add_layer(kind, with_file_context(path, [&] { return read_edge_list(path, net.words); }));
  }
  return net;
}

std::string graph_hash_hex(const WeightedGraph& g, const StringTable& words) {
  std::ostringstream buf;
  write_edge_list(buf, g, words);
  return hash_hex(fnv1a64(buf.str()));
}

json spread_params_json(const SpreadParams& p) {
  json doc;
  doc["initial_activation"] = p.initial_activation;
  doc["time_steps"] = p.time_steps;
  doc["retention"] = p.retention;
  doc["decay"] = p.decay;
  doc["suppress"] = p.suppress;
  return doc;
}

// One layer's spreading run: diameter, resolved parameters, raw activation
// matrix over the lexicon's primes and targets.
struct LayerRun {
  LayerKind kind = LayerKind::associative;
  DiameterResult diam;
  SpreadParams params;
  ActivationMatrix raw;
  std::string graph_hash;
};

LayerRun run_layer(const WeightedGraph& g, const StringTable& words, LayerKind kind,
                   const Lexicon& lex, const RunConfig& c) {
  LayerRun run;
  run.kind = kind;
  run.diam = diameter(g, c.diameter_mode);
  run.params = default_spread_params(g, run.diam.value);
  if (c.initial_activation) run.params.initial_activation = *c.initial_activation;
  if (c.time_steps) run.params.time_steps = *c.time_steps;
  if (c.retention) run.params.retention = *c.retention;
  if (c.decay) run.params.decay = *c.decay;
  if (c.suppress) run.params.suppress = *c.suppress;

  const auto primes = lex.prime_words();
  const auto targets = lex.target_words();
  run.raw = activation_matrix(g, words, primes, targets, run.params, c.threads);
  run.graph_hash = graph_hash_hex(g, words);
  return run;
}

json coverage_json(const ActivationMatrix& m) {
  json doc;
  doc["missing_primes"] = m.missing_primes;
  doc["missing_targets"] = m.missing_targets;
  doc["zero_targets"] = m.zero_targets;
  return doc;
}

json layer_run_json(const LayerRun& run) {
  json doc;
  doc["layer"] = to_string(run.kind);
  doc["diameter"] = {{"value", run.diam.value},
                     {"certified", run.diam.certified},
                     {"bfs_runs", run.diam.bfs_runs}};
  doc["params"] = spread_params_json(run.params);
  doc["graph_fnv1a64"] = run.graph_hash;
  return doc;
}

json matrix_json(const ActivationMatrix& m) {
  json doc;
  doc["primes"] = m.primes;
  doc["targets"] = m.targets;
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.values.cols(); ++c) row.push_back(m.values(r, c));
    rows.push_back(std::move(row));
  }
  doc["values"] = std::move(rows);
  return doc;
}

json cell_json(const BiasCell& cell) {
  json doc;
  doc["topic"] = cell.topic ? to_string(*cell.topic) : "aggregate";
  doc["side"] = to_string(cell.side);
  doc["usable"] = cell.usable;
  if (cell.usable) {
    doc["n_pairs"] = cell.effect.n_pairs;
    doc["n_zero_dropped"] = cell.effect.n_zero_dropped;
    doc["w_plus"] = cell.effect.w_plus;
    doc["w_minus"] = cell.effect.w_minus;
    doc["r"] = cell.effect.r;
    doc["p_value"] = cell.effect.p_value;
    doc["degenerate"] = cell.effect.degenerate;
    if (!cell.topic) doc["mean_topic_r"] = cell.mean_topic_r;
  } else {
    doc["note"] = cell.note;
  }
  return doc;
}

BiasCell cell_from_json(const json& doc) {
  BiasCell cell;
  const std::string topic = doc.at("topic").get<std::string>();
  if (topic != "aggregate") cell.topic = *topic_from_string(topic);
  cell.side = *gender_from_string(doc.at("side").get<std::string>());
  cell.usable = doc.at("usable").get<bool>();
  if (cell.usable) {
    cell.effect.n_pairs = doc.at("n_pairs").get<std::size_t>();
    cell.effect.n_zero_dropped = doc.at("n_zero_dropped").get<std::size_t>();
    cell.effect.w_plus = doc.at("w_plus").get<double>();
    cell.effect.w_minus = doc.at("w_minus").get<double>();
    cell.effect.r = doc.at("r").get<double>();
    cell.effect.p_value = doc.at("p_value").get<double>();
    cell.effect.degenerate = doc.at("degenerate").get<bool>();
    if (doc.contains("mean_topic_r")) cell.mean_topic_r = doc.at("mean_topic_r").get<double>();
  } else {
    cell.note = doc.value("note", "");
  }
  return cell;
}

struct BiasLayerData {
  LayerKind kind = LayerKind::associative;
  ActivationMatrix normalized;
  std::vector<BiasCell> cells;
};

struct AgentBiasData {
  std::string name;
  std::vector<BiasLayerData> layers;
};

const BiasCell* find_cell(const std::vector<BiasCell>& cells, std::optional<Topic> topic,
                          Gender side) {
  for (const auto& c : cells)
    if (c.topic == topic && c.side == side) return &c;
  return nullptr;
}

// Heatmaps per (agent, layer, side) and the two effect plots, with CSV
// siblings; shared by cmd_bias and cmd_render.
void write_bias_artifacts(OutputDir& out, const std::vector<AgentBiasData>& agents,
                          const Lexicon& lex) {
  std::map<std::string, Gender> target_gender;
  for (const auto& t : lex.targets) target_gender[t.word] = t.gender;
  std::map<std::string, Gender> prime_gender;
  for (const auto& p : lex.prime_pairs) {
    prime_gender[p.female] = Gender::female;
    prime_gender[p.male] = Gender::male;
  }

  for (const auto& agent : agents) {
    for (const auto& layer : agent.layers) {
      for (Gender side : {Gender::female, Gender::male}) {
        ActivationMatrix sub;
        sub.primes = layer.normalized.primes;
        sub.normalized = true;
        sub.params = layer.normalized.params;
        std::vector<Eigen::Index> cols;
        for (std::size_t j = 0; j < layer.normalized.targets.size(); ++j) {
          auto it = target_gender.find(layer.normalized.targets[j]);
          if (it != target_gender.end() && it->second == side) {
            cols.push_back(static_cast<Eigen::Index>(j));
            sub.targets.push_back(layer.normalized.targets[j]);
          }
        }
        if (cols.empty()) continue;  // heatmap degrades to missing
        sub.values.resize(layer.normalized.values.rows(), static_cast<Eigen::Index>(cols.size()));
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(cols.size()); ++j)
          sub.values.col(j) = layer.normalized.values.col(cols[static_cast<std::size_t>(j)]);

        HeatmapStyle style;
        style.title = agent.name + " / " + to_string(layer.kind) + " / " + to_string(side) +
                      " targets (normalized activation)";
        std::size_t split = 0;
        for (const auto& p : sub.primes)
          if (prime_gender.count(p) && prime_gender[p] == Gender::female) ++split;
        style.group_split_row = split;

        const std::string stem =
            "heatmap_" + agent.name + "_" + to_string(layer.kind) + "_" + to_string(side);
        out.write(stem + ".svg", render_heatmap(sub, style));
        out.write(stem + ".csv", activation_matrix_csv(sub));
      }
    }
  }

  std::vector<std::string> layer_labels;
  for (LayerKind kind : kLayerOrder) layer_labels.emplace_back(to_string(kind));

  auto r_of = [&](const AgentBiasData& agent, LayerKind kind, std::optional<Topic> topic,
                  Gender side) -> std::optional<double> {
    for (const auto& layer : agent.layers)
      if (layer.kind == kind) {
        const BiasCell* cell = find_cell(layer.cells, topic, side);
        if (cell && cell->usable) return cell->effect.r;
      }
    return std::nullopt;
  };

  for (bool aggregated : {false, true}) {
    EffectPlotData data;
    data.title = aggregated ? "effect sizes aggregated over topics"
                            : "effect sizes by stereotype topic";
    data.layers = layer_labels;
    for (Gender side : {Gender::female, Gender::male}) {
      EffectPanel panel;
      panel.name = std::string(to_string(side)) + " targets";
      for (const auto& agent : agents) {
        if (aggregated) {
          EffectSeries series;
          series.label = agent.name;
          for (LayerKind kind : kLayerOrder)
            series.values.push_back(r_of(agent, kind, std::nullopt, side));
          panel.series.push_back(std::move(series));
        } else {
          for (Topic topic : kAllTopics) {
            EffectSeries series;
            series.label = agent.name + ":" + to_string(topic);
            for (LayerKind kind : kLayerOrder)
              series.values.push_back(r_of(agent, kind, topic, side));
            panel.series.push_back(std::move(series));
          }
        }
      }
      data.panels.push_back(std::move(panel));
    }
    const std::string stem = aggregated ? "effects_aggregated" : "effects_disaggregated";
    out.write(stem + ".svg", render_effect_plot(data));
    out.write(stem + ".csv", effect_plot_csv(data));
  }
}

std::string bias_report_csv(const std::vector<AgentBiasData>& agents) {
  std::ostringstream out;
  out << "agent,layer,topic,side,n_pairs,n_zero_dropped,w_plus,w_minus,r,p_value,degenerate,"
         "mean_topic_r,note\n";
  for (const auto& agent : agents)
    for (const auto& layer : agent.layers)
      for (const auto& cell : layer.cells) {
        out << agent.name << ',' << to_string(layer.kind) << ','
            << (cell.topic ? to_string(*cell.topic) : "aggregate") << ',' << to_string(cell.side)
            << ',';
        if (cell.usable) {
          out << cell.effect.n_pairs << ',' << cell.effect.n_zero_dropped << ','
              << format_double(cell.effect.w_plus) << ',' << format_double(cell.effect.w_minus)
              << ',' << format_double(cell.effect.r) << ',' << format_double(cell.effect.p_value)
              << ',' << (cell.effect.degenerate ? "true" : "false") << ',';
          if (!cell.topic) out << format_double(cell.mean_topic_r);
          out << ',';
        } else {
          out << ",,,,,,,,";
        }
        out << cell.note << '\n';
      }
  return out.str();
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& config_path) {
  json doc = load_json_file(config_path, ErrorCode::InvalidConfig);
  const std::filesystem::path base = config_path.parent_path();

  RunConfig c;
  try {
    if (!doc.contains("agents") || !doc["agents"].is_array() || doc["agents"].empty())
      throw Error(ErrorCode::InvalidConfig, "config field 'agents' must be a non-empty array");
    for (const auto& a : doc["agents"]) {
      AgentConfig agent;
      agent.name = a.at("name").get<std::string>();
      agent.associations_raw = a.at("associations").get<std::string>();
      agent.definitions_raw = a.at("definitions").get<std::string>();
      agent.relations_raw = a.at("relations").get<std::string>();
      agent.associations = resolve(base, agent.associations_raw);
      agent.definitions = resolve(base, agent.definitions_raw);
      agent.relations = resolve(base, agent.relations_raw);
      if (a.contains("format")) {
        agent.format_raw = a.at("format").get<std::string>();
        agent.format = resolve(base, agent.format_raw);
      }
      c.agents.push_back(std::move(agent));
    }

    if (!doc.contains("vocabulary"))
      throw Error(ErrorCode::InvalidConfig, "config field 'vocabulary' is required");
    c.vocabulary_raw = doc.at("vocabulary").get<std::string>();
    c.vocabulary = resolve(base, c.vocabulary_raw);

    if (doc.contains("format")) {
      c.format_raw = doc.at("format").get<std::string>();
      c.format = resolve(base, c.format_raw);
    }
    if (doc.contains("lexicon")) {
      c.lexicon_raw = doc.at("lexicon").get<std::string>();
      c.lexicon = resolve(base, c.lexicon_raw);
    }
    if (doc.contains("out")) c.out = resolve(base, doc.at("out").get<std::string>());
    c.seed = doc.value("seed", c.seed);
    c.threads = doc.value("threads", c.threads);
    c.exact_eigen_max = doc.value("exact_eigen_max", c.exact_eigen_max);
    if (doc.contains("diameter_mode")) {
      const std::string mode = doc.at("diameter_mode").get<std::string>();
      if (mode == "exact")
        c.diameter_mode = DiameterMode::exact;
      else if (mode == "approx")
        c.diameter_mode = DiameterMode::approx;
      else
        throw Error(ErrorCode::InvalidConfig, "diameter_mode must be 'exact' or 'approx'");
    }
    if (doc.contains("slq")) {
      c.slq_probes = doc["slq"].value("probes", c.slq_probes);
      c.slq_depth = doc["slq"].value("depth", c.slq_depth);
    }
    if (doc.contains("spread")) {
      const auto& s = doc["spread"];
      if (s.contains("initial_activation"))
        c.initial_activation = s.at("initial_activation").get<double>();
      if (s.contains("time_steps")) c.time_steps = s.at("time_steps").get<int>();
      if (s.contains("retention")) c.retention = s.at("retention").get<double>();
      if (s.contains("decay")) c.decay = s.at("decay").get<double>();
      if (s.contains("suppress")) c.suppress = s.at("suppress").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, config_path.string() + ": " + e.what());
  }
  return c;
}

void RunConfig::validate() const {
  if (agents.empty()) throw Error(ErrorCode::InvalidConfig, "config has no agents");

  auto must_exist = [](const std::filesystem::path& p, const std::string& field) {
    if (!std::filesystem::exists(p))
      throw Error(ErrorCode::InvalidConfig, field + ": file not found: " + p.string());
  };

  std::set<std::string> names;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& a = agents[i];
    const std::string prefix = "agents[" + std::to_string(i) + "]";
    if (a.name.empty()) throw Error(ErrorCode::InvalidConfig, prefix + ".name is empty");
    if (!names.insert(a.name).second)
      throw Error(ErrorCode::InvalidConfig, "duplicate agent name '" + a.name + "'");
    must_exist(a.associations, prefix + ".associations");
    must_exist(a.definitions, prefix + ".definitions");
    must_exist(a.relations, prefix + ".relations");
    if (a.format) must_exist(*a.format, prefix + ".format");
  }
  must_exist(vocabulary, "vocabulary");
  if (format) must_exist(*format, "format");
  if (lexicon) must_exist(*lexicon, "lexicon");

  if (threads < 1) throw Error(ErrorCode::InvalidConfig, "threads must be >= 1");
  if (slq_probes < 1 || slq_depth < 1)
    throw Error(ErrorCode::InvalidConfig, "slq probes and depth must be >= 1");
  if (initial_activation && !(*initial_activation > 0.0))
    throw Error(ErrorCode::InvalidConfig, "spread.initial_activation must be positive");
  if (time_steps && *time_steps < 1)
    throw Error(ErrorCode::InvalidConfig, "spread.time_steps must be >= 1");
  if (retention && !(*retention >= 0.0 && *retention <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "spread.retention must be in [0, 1]");
  if (decay && !(*decay >= 0.0 && *decay <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "spread.decay must be in [0, 1]");
  if (suppress && !(*suppress >= 0.0))
    throw Error(ErrorCode::InvalidConfig, "spread.suppress must be >= 0");
}

void cmd_build(const RunConfig& config) {
  config.validate();
  OutputDir out(config.out);
  const Vocabulary vocab = load_vocabulary(config.vocabulary);

  std::vector<BuiltAgent> built(config.agents.size());
  parallel_for(config.agents.size(), config.threads,
               [&](std::size_t i) { built[i] = build_agent(config, config.agents[i], vocab); });

  std::vector<MultilayerNetwork> nets;
  for (std::size_t i = 0; i < built.size(); ++i) {
    const auto& agent = config.agents[i];
    for (const auto& [kind, layer] : built[i].net.layers)
      {
        std::ostringstream buf;
        write_edge_list(buf, layer, built[i].net.words);
        out.write(layer_file(agent.name, kind), buf.str());
      }
    out.write("parse_report_" + agent.name + ".json", built[i].report.dump(2) + "\n");
    nets.push_back(std::move(built[i].net));
  }

  out.write("stats.csv", stats_csv(nets));
  out.write_manifest("build", config, options_snapshot(config));
}

void cmd_stats(const RunConfig& config) {
  config.validate();
  OutputDir out(config.out);

  std::vector<MultilayerNetwork> nets;
  for (const auto& agent : config.agents) nets.push_back(read_multilayer(config.out, agent.name));

  out.write("stats.csv", stats_csv(nets));
  out.write_manifest("stats", config, options_snapshot(config));
}

void cmd_reduce(const RunConfig& config) {
  config.validate();
  OutputDir out(config.out);

  ReduceOptions opts;
  opts.exact_eigen_max = config.exact_eigen_max;
  opts.slq.probes = config.slq_probes;
  opts.slq.depth = config.slq_depth;
  opts.slq.seed = config.seed;
  opts.threads = config.threads;

  for (const auto& agent : config.agents) {
    MultilayerNetwork net = read_multilayer(config.out, agent.name);
    ReductionReport report = reduce(net, opts);
    out.write("reduction_" + agent.name + ".json", reduction_report_json(report));
    out.write("qcurve_" + agent.name + ".csv", q_curve_csv(report));
    out.write("qcurve_" + agent.name + ".svg", render_q_curve(report));
  }
  out.write_manifest("reduce", config, options_snapshot(config));
}

void cmd_spread(const RunConfig& config) {
  config.validate();
  OutputDir out(config.out);
  Lexicon storage;
  const Lexicon& lex = lexicon_for(config, storage);

  json runs = json::array();
  for (const auto& agent : config.agents) {
    MultilayerNetwork net = read_multilayer(config.out, agent.name);
    for (const auto& [kind, layer] : net.layers) {
      LayerRun run = run_layer(layer, net.words, kind, lex, config);
      out.write("activation_" + agent.name + "_" + to_string(kind) + ".csv",
                activation_matrix_csv(run.raw));
      json entry = layer_run_json(run);
      entry["agent"] = agent.name;
      entry["coverage"] = coverage_json(run.raw);
      runs.push_back(std::move(entry));
    }
  }

  json options = options_snapshot(config);
  options["runs"] = std::move(runs);
  out.write_manifest("spread", config, std::move(options));
}

void cmd_bias(const RunConfig& config) {
  config.validate();
  OutputDir out(config.out);
  Lexicon storage;
  const Lexicon& lex = lexicon_for(config, storage);

  std::vector<AgentBiasData> agents;
  json report_agents = json::array();
  for (const auto& agent : config.agents) {
    MultilayerNetwork net = read_multilayer(config.out, agent.name);
    AgentBiasData data;
    data.name = agent.name;
    json layers = json::array();

    for (const auto& [kind, layer] : net.layers) {
      LayerRun run = run_layer(layer, net.words, kind, lex, config);
      BiasLayerData layer_data;
      layer_data.kind = kind;
      layer_data.normalized = normalize(run.raw);
      layer_data.cells = layer_bias_cells(layer_data.normalized, lex);

      json entry = layer_run_json(run);
      entry["coverage"] = coverage_json(layer_data.normalized);
      entry["matrix"] = matrix_json(layer_data.normalized);
      json cells = json::array();
      for (const auto& cell : layer_data.cells) cells.push_back(cell_json(cell));
      entry["cells"] = std::move(cells);
      layers.push_back(std::move(entry));

      data.layers.push_back(std::move(layer_data));
    }

    json agent_doc;
    agent_doc["name"] = agent.name;
    agent_doc["layers"] = std::move(layers);
    report_agents.push_back(std::move(agent_doc));
    agents.push_back(std::move(data));
  }

  json report;
  report["seed"] = config.seed;
  report["lexicon"] = {{"prime_pairs", lex.prime_pairs.size()}, {"targets", lex.targets.size()}};
  report["agents"] = std::move(report_agents);
  out.write("bias_report.json", report.dump(2) + "\n");
  out.write("bias_report.csv", bias_report_csv(agents));

  write_bias_artifacts(out, agents, lex);
  out.write_manifest("bias", config, options_snapshot(config));
}

void cmd_render(const RunConfig& config) {
  config.validate();
  OutputDir out(config.out);
  Lexicon storage;
  const Lexicon& lex = lexicon_for(config, storage);
  bool rendered_any = false;

  const auto bias_path = config.out / "bias_report.json";
  if (std::filesystem::exists(bias_path)) {
    json report = load_json_file(bias_path, ErrorCode::EmptyReport);
    std::vector<AgentBiasData> agents;
    for (const auto& agent_doc : report.at("agents")) {
      AgentBiasData data;
      data.name = agent_doc.at("name").get<std::string>();
      for (const auto& layer_doc : agent_doc.at("layers")) {
        BiasLayerData layer;
        layer.kind = *layer_kind_from_string(layer_doc.at("layer").get<std::string>());
        const auto& matrix = layer_doc.at("matrix");
        layer.normalized.primes = matrix.at("primes").get<std::vector<std::string>>();
        layer.normalized.targets = matrix.at("targets").get<std::vector<std::string>>();
        layer.normalized.normalized = true;
        const auto& values = matrix.at("values");
        layer.normalized.values.resize(static_cast<Eigen::Index>(layer.normalized.primes.size()),
                                       static_cast<Eigen::Index>(layer.normalized.targets.size()));
        for (Eigen::Index r = 0; r < layer.normalized.values.rows(); ++r)
          for (Eigen::Index c = 0; c < layer.normalized.values.cols(); ++c)
            layer.normalized.values(r, c) =
                values.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
        for (const auto& cell_doc : layer_doc.at("cells"))
          layer.cells.push_back(cell_from_json(cell_doc));
        data.layers.push_back(std::move(layer));
      }
      agents.push_back(std::move(data));
    }
    write_bias_artifacts(out, agents, lex);
    rendered_any = true;
  }

  for (const auto& agent : config.agents) {
    const auto path = config.out / ("reduction_" + agent.name + ".json");
    if (!std::filesystem::exists(path)) continue;
    json doc = load_json_file(path, ErrorCode::EmptyReport);

    ReductionReport report;
    report.layer_names = doc.at("layers").get<std::vector<std::string>>();
    report.q_curve = doc.at("q_curve").get<std::vector<double>>();
    report.irreducible = doc.at("irreducible").get<bool>();
    report.degenerate = doc.at("degenerate").get<bool>();
    report.aggregate_entropy_bits = doc.at("aggregate_entropy_bits").get<double>();
    report.method =
        doc.at("method").get<std::string>() == "exact" ? EntropyMethod::exact
                                                       : EntropyMethod::estimated;
    for (const auto& blocks : doc.at("optimal_blocks"))
      report.optimal.blocks.push_back(blocks.get<std::vector<std::size_t>>());
    const std::size_t n = report.q_curve.size();
    for (std::size_t k = 0; k < n; ++k) {
      LayerPartition p;
      p.blocks.resize(n - k);  // only the block count feeds the renderer
      report.partitions.push_back(std::move(p));
    }

    out.write("qcurve_" + agent.name + ".csv", q_curve_csv(report));
    out.write("qcurve_" + agent.name + ".svg", render_q_curve(report));
    rendered_any = true;
  }

  if (!rendered_any)
    throw Error(ErrorCode::EmptyReport,
                "nothing to render in " + config.out.string() + "; run 'bias' or 'reduce' first");
  out.write_manifest("render", config, options_snapshot(config));
}

}  // namespace semnet
