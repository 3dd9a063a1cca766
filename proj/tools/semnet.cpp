// semnet: multilayer semantic-memory network toolkit.
#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "semnet/pipeline.hpp"

namespace {

struct CliOverrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::size_t> exact_eigen_max;
};

void add_common(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config, "run configuration JSON")->required();
  cmd->add_option("--out", o.out, "output directory (overrides config)");
  cmd->add_option("--seed", o.seed, "RNG seed (overrides config)");
  cmd->add_option("--threads", o.threads, "parallelism cap (overrides config)");
  cmd->add_option("--exact-eigen-max", o.exact_eigen_max,
                  "max aligned size for exact eigensolves (overrides config)");
}

semnet::RunConfig make_config(const CliOverrides& o) {
  semnet::RunConfig config = semnet::RunConfig::load(o.config);
  if (!o.out.empty()) config.out = o.out;
  if (o.seed) config.seed = *o.seed;
  if (o.threads) config.threads = *o.threads;
  if (o.exact_eigen_max) config.exact_eigen_max = *o.exact_eigen_max;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilayer semantic-memory networks: build, reduce, spread, bias, render"};
  app.require_subcommand(1);

  CliOverrides overrides;
  std::function<void(const semnet::RunConfig&)> action;

  const std::pair<const char*, void (*)(const semnet::RunConfig&)> commands[] = {
      {"build", semnet::cmd_build},   {"stats", semnet::cmd_stats},
      {"reduce", semnet::cmd_reduce}, {"spread", semnet::cmd_spread},
      {"bias", semnet::cmd_bias},     {"render", semnet::cmd_render},
  };
  const char* descriptions[] = {
      "parse corpora and write layer graphs + network statistics",
      "recompute the statistics table from built graphs",
      "structural reducibility analysis per agent",
      "spreading-activation matrices per agent and layer",
      "bias report, heatmaps, and effect plots",
      "re-render SVG/CSV artifacts from saved reports",
  };

  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* cmd = app.add_subcommand(commands[i].first, descriptions[i]);
    add_common(cmd, overrides);
    auto fn = commands[i].second;
    cmd->callback([&overrides, &action, fn] { action = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    action(make_config(overrides));
    return 0;
  } catch (const semnet::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 4;
  }
}
