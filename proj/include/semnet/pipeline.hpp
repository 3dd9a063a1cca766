// Pipeline orchestration: run configuration, the six CLI commands, and
// reproducible run manifests.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semnet/activation.hpp"
#include "semnet/graph.hpp"
#include "semnet/ingest.hpp"

namespace semnet {

struct AgentConfig {
  std::string name;
  std::filesystem::path associations;
  std::filesystem::path definitions;
  std::filesystem::path relations;
  std::optional<std::filesystem::path> format;  // per-agent descriptor override

  // Paths exactly as written in the config file (manifests record these so
  // output bytes do not depend on where the tree is checked out).
  std::string associations_raw, definitions_raw, relations_raw, format_raw;
};

struct RunConfig {
  std::vector<AgentConfig> agents;
  std::filesystem::path vocabulary;
  std::optional<std::filesystem::path> format;
  std::optional<std::filesystem::path> lexicon;
  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  std::size_t exact_eigen_max = 4000;
  DiameterMode diameter_mode = DiameterMode::approx;
  int slq_probes = 32;
  int slq_depth = 80;

  // Spread overrides; unset fields fall back to the standard defaults
  // (initial = node count, steps = 2 x diameter, retention 0.5).
  std::optional<double> initial_activation;
  std::optional<int> time_steps;
  std::optional<double> retention;
  std::optional<double> decay;
  std::optional<double> suppress;

  std::string vocabulary_raw, format_raw, lexicon_raw;

  // Relative paths resolve against the config file's directory.
  static RunConfig load(const std::filesystem::path& config_path);
  void validate() const;  // throws InvalidConfig naming the field
};

inline constexpr LayerKind kLayerOrder[] = {LayerKind::associative, LayerKind::definitional,
                                            LayerKind::categorical};

// Commands throw semnet::Error on failure; the CLI maps categories to exit
// codes. Each writes a manifest_<command>.json into the output directory.
void cmd_build(const RunConfig& config);
void cmd_stats(const RunConfig& config);
void cmd_reduce(const RunConfig& config);
void cmd_spread(const RunConfig& config);
void cmd_bias(const RunConfig& config);
void cmd_render(const RunConfig& config);

}  // namespace semnet
