#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "semnet/activation.hpp"

using namespace semnet;

namespace {

// Spanning tree plus extra random edges: connected by construction.
WeightedGraph random_connected(std::size_t n, double extra_p, std::uint64_t seed,
                               std::uint32_t id_offset = 0) {
  std::mt19937_64 engine(seed);
  auto uniform = [&] { return (engine() >> 11) * 0x1.0p-53; };
  std::vector<NodeId> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = id_offset + static_cast<NodeId>(i);
  std::vector<Edge> edges;
  std::set<std::pair<NodeId, NodeId>> seen;
  for (std::size_t i = 1; i < n; ++i) {
    auto j = static_cast<std::size_t>(uniform() * static_cast<double>(i));
    edges.push_back({nodes[j], nodes[i], 1.0 + 4.0 * uniform()});
    seen.insert({nodes[j], nodes[i]});
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform() < extra_p && !seen.count({nodes[i], nodes[j]}))
        edges.push_back({nodes[i], nodes[j], 1.0 + 4.0 * uniform()});
  return WeightedGraph::from_edges(std::move(nodes), std::move(edges));
}

// Independent all-pairs BFS oracle over a plain adjacency map.
int oracle_diameter(const WeightedGraph& g) {
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& e : g.edges()) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  int diam = 0;
  for (NodeId source : g.nodes()) {
    std::map<NodeId, int> dist{{source, 0}};
    std::queue<NodeId> queue;
    queue.push(source);
    while (!queue.empty()) {
      NodeId u = queue.front();
      queue.pop();
      for (NodeId v : adj[u])
        if (!dist.count(v)) {
          dist[v] = dist[u] + 1;
          diam = std::max(diam, dist[v]);
          queue.push(v);
        }
    }
  }
  return diam;
}

WeightedGraph path_abc(StringTable& words) {
  NodeId a = words.intern("a"), b = words.intern("b"), c = words.intern("c");
  return WeightedGraph::from_edges({a, b, c}, {{a, b, 1.0}, {b, c, 1.0}});
}

}  // namespace

TEST_CASE("single-step spread on a path matches the hand-computed oracle") {
  StringTable words;
  auto g = path_abc(words);
  SpreadParams p;
  p.initial_activation = 3.0;
  p.time_steps = 1;

  auto out = spread(g, *words.find("a"), p);
  CHECK(out.values(static_cast<Eigen::Index>(g.index_of(*words.find("a")))) == 1.5);
  CHECK(out.values(static_cast<Eigen::Index>(g.index_of(*words.find("b")))) == 1.5);
  CHECK(out.values(static_cast<Eigen::Index>(g.index_of(*words.find("c")))) == 0.0);
}

TEST_CASE("retention 1 keeps all activation on the prime") {
  StringTable words;
  auto g = path_abc(words);
  SpreadParams p;
  p.initial_activation = 7.0;
  p.time_steps = 5;
  p.retention = 1.0;
  auto out = spread(g, *words.find("b"), p);
  CHECK(out.values(static_cast<Eigen::Index>(g.index_of(*words.find("b")))) == 7.0);
  CHECK(out.values.sum() == 7.0);
}

TEST_CASE("star center splits the outflow equally among leaves") {
  std::vector<NodeId> nodes = {0, 1, 2, 3, 4};
  std::vector<Edge> edges;
  for (NodeId leaf = 1; leaf <= 4; ++leaf) edges.push_back({0, leaf, 1.0});
  auto g = WeightedGraph::from_edges(std::move(nodes), std::move(edges));

  SpreadParams p;
  p.initial_activation = 16.0;
  p.time_steps = 1;
  auto out = spread(g, 0, p);
  CHECK(out.values(static_cast<Eigen::Index>(g.index_of(0))) == 8.0);
  for (NodeId leaf = 1; leaf <= 4; ++leaf)
    CHECK(out.values(static_cast<Eigen::Index>(g.index_of(leaf))) == 2.0);
}

TEST_CASE("activation is conserved and non-negative on random connected graphs") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    auto g = random_connected(20 + 5 * seed, 0.05, seed);
    SpreadParams p;
    p.initial_activation = static_cast<double>(g.node_count());
    for (int steps : {1, 3, 8}) {
      p.time_steps = steps;
      auto out = spread(g, g.nodes()[seed % g.node_count()], p);
      CHECK(out.values.minCoeff() >= 0.0);
      CHECK(std::abs(out.values.sum() - p.initial_activation) <=
            1e-9 * p.initial_activation);
    }
  }
}

TEST_CASE("decay shrinks the total geometrically; suppress zeroes small values") {
  auto g = random_connected(30, 0.1, 42);
  SpreadParams p;
  p.initial_activation = 30.0;
  p.time_steps = 4;
  p.decay = 0.25;
  auto out = spread(g, g.nodes()[0], p);
  const double want = 30.0 * std::pow(0.75, 4);
  CHECK(out.values.sum() == doctest::Approx(want).epsilon(1e-12));

  StringTable words;
  auto path = path_abc(words);
  SpreadParams q;
  q.initial_activation = 3.0;
  q.time_steps = 1;
  q.suppress = 2.0;  // both 1.5 values drop
  auto sup = spread(path, *words.find("a"), q);
  CHECK(sup.values.sum() == 0.0);
}

TEST_CASE("after one step only the prime and its neighbors are active") {
  auto g = random_connected(40, 0.08, 3);
  NodeId prime = g.nodes()[7];
  SpreadParams p;
  p.initial_activation = 40.0;
  p.time_steps = 1;
  auto out = spread(g, prime, p);

  std::set<NodeId> allowed{prime};
  for (const auto& nb : g.neighbors(prime)) allowed.insert(nb.id);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (!allowed.count(g.nodes()[i]))
      CHECK(out.values(static_cast<Eigen::Index>(i)) == 0.0);
  }
}

TEST_CASE("spread is equivariant under node relabeling") {
  auto g = random_connected(25, 0.1, 9);
  auto h = random_connected(25, 0.1, 9, /*id_offset=*/500);  // same structure, shifted ids

  SpreadParams p;
  p.initial_activation = 25.0;
  p.time_steps = 3;
  auto a = spread(g, g.nodes()[4], p);
  auto b = spread(h, h.nodes()[4], p);
  for (std::size_t i = 0; i < g.node_count(); ++i)
    CHECK(a.values(static_cast<Eigen::Index>(i)) == b.values(static_cast<Eigen::Index>(i)));
}

TEST_CASE("symmetric nodes receive equal activation") {
  // Two leaves hanging off each end of an edge: perfect mirror symmetry.
  auto g = WeightedGraph::from_edges({0, 1, 2, 3, 4, 5},
                                     {{0, 1, 2.0}, {0, 2, 1.0}, {0, 3, 1.0}, {1, 4, 1.0},
                                      {1, 5, 1.0}});
  SpreadParams p;
  p.initial_activation = 6.0;
  p.time_steps = 4;
  auto out = spread(g, 0, p);
  CHECK(out.values(static_cast<Eigen::Index>(g.index_of(2))) ==
        out.values(static_cast<Eigen::Index>(g.index_of(3))));
  CHECK(out.values(static_cast<Eigen::Index>(g.index_of(4))) ==
        out.values(static_cast<Eigen::Index>(g.index_of(5))));
}

TEST_CASE("diameter identities") {
  StringTable words;
  auto path = path_abc(words);
  CHECK(diameter(path, DiameterMode::exact).value == 2);
  CHECK(diameter(path, DiameterMode::approx).value == 2);

  std::vector<NodeId> nodes(6);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < 6; ++i) nodes[i] = i;
  for (NodeId i = 0; i < 6; ++i)
    for (NodeId j = i + 1; j < 6; ++j) edges.push_back({i, j, 1.0});
  auto k6 = WeightedGraph::from_edges(std::move(nodes), std::move(edges));
  CHECK(diameter(k6, DiameterMode::exact).value == 1);
  CHECK(diameter(k6, DiameterMode::approx).value == 1);

  auto single = WeightedGraph::from_edges({3}, {});
  CHECK(diameter(single, DiameterMode::exact).value == 0);
}

TEST_CASE("approx diameter equals exact and the all-pairs oracle") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto g = random_connected(60 + 10 * seed, 0.02, 100 + seed);
    auto exact = diameter(g, DiameterMode::exact);
    auto approx = diameter(g, DiameterMode::approx);
    CHECK(exact.value == oracle_diameter(g));
    CHECK(approx.value == exact.value);
    CHECK(approx.certified);
    CHECK(exact.bfs_runs == g.node_count());
    CHECK(approx.bfs_runs < exact.bfs_runs);
  }
}

TEST_CASE("approx diameter matches exact on a larger sparse graph") {
  auto g = random_connected(500, 0.004, 77);
  CHECK(diameter(g, DiameterMode::approx).value == diameter(g, DiameterMode::exact).value);
}

TEST_CASE("diameter of a disconnected graph throws") {
  auto g = WeightedGraph::from_edges({0, 1, 2, 3}, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK_THROWS_AS(diameter(g, DiameterMode::exact), Error);
  CHECK_THROWS_AS(diameter(g, DiameterMode::approx), Error);
}

TEST_CASE("default spread params follow the layer") {
  auto g = random_connected(50, 0.05, 12);
  auto p = default_spread_params(g, 6);
  CHECK(p.initial_activation == 50.0);
  CHECK(p.time_steps == 12);
  CHECK(p.retention == 0.5);
  CHECK(p.decay == 0.0);
  CHECK(p.suppress == 0.0);
}

TEST_CASE("spread validates the prime and the parameters") {
  StringTable words;
  auto g = path_abc(words);
  SpreadParams p;
  CHECK_THROWS_AS(spread(g, 99, p), Error);

  SpreadParams bad = p;
  bad.retention = 1.5;
  CHECK_THROWS_AS(spread(g, *words.find("a"), bad), Error);
  bad = p;
  bad.time_steps = 0;
  CHECK_THROWS_AS(spread(g, *words.find("a"), bad), Error);
  bad = p;
  bad.initial_activation = 0.0;
  CHECK_THROWS_AS(spread(g, *words.find("a"), bad), Error);
}

TEST_CASE("activation matrix: coverage, ordering, and the primed-doctor scenario") {
  StringTable words;
  std::vector<Edge> edges = {
      {words.intern("woman"), words.intern("nurse"), 3.0},
      {words.intern("nurse"), words.intern("doctor"), 1.0},
      {words.intern("man"), words.intern("doctor"), 2.0},
      {words.intern("doctor"), words.intern("hospital"), 1.0},
      {words.intern("man"), words.intern("hospital"), 1.0},
  };
  std::vector<NodeId> nodes;
  for (NodeId id = 0; id < 5; ++id) nodes.push_back(id);
  auto g = WeightedGraph::from_edges(std::move(nodes), std::move(edges));

  SpreadParams p;
  p.initial_activation = 5.0;
  p.time_steps = 2;
  std::vector<std::string> primes = {"woman", "man", "ghost"};
  std::vector<std::string> targets = {"doctor", "unknown"};
  auto m = activation_matrix(g, words, primes, targets, p);

  CHECK(m.primes == std::vector<std::string>{"woman", "man"});
  CHECK(m.targets == std::vector<std::string>{"doctor"});
  CHECK(m.missing_primes == std::vector<std::string>{"ghost"});
  CHECK(m.missing_targets == std::vector<std::string>{"unknown"});
  CHECK(m.values(1, 0) > m.values(0, 0));  // man primes doctor harder than woman

  std::string csv = activation_matrix_csv(m);
  CHECK(csv.rfind("prime,doctor\n", 0) == 0);
  CHECK(csv.find("\nwoman,") != std::string::npos);
  CHECK(csv.find("\nman,") != std::string::npos);

  std::vector<std::string> absent = {"ghost", "phantom"};
  CHECK_THROWS_AS(activation_matrix(g, words, absent, targets, p), Error);
}

TEST_CASE("activation matrix is independent of thread count") {
  auto g = random_connected(40, 0.1, 21);
  StringTable words;
  std::vector<std::string> names;
  for (NodeId id : g.nodes()) {
    // Interned in node order so find() resolves; names w0, w1, ...
    names.push_back("w" + std::to_string(id));
    words.intern(names.back());
  }
  SpreadParams p;
  p.initial_activation = 40.0;
  p.time_steps = 4;

  auto one = activation_matrix(g, words, names, names, p, 1);
  auto four = activation_matrix(g, words, names, names, p, 4);
  CHECK((one.values.array() == four.values.array()).all());
  CHECK(activation_matrix_csv(one) == activation_matrix_csv(four));
}
