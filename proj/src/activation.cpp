#include "semnet/activation.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "semnet/graph_io.hpp"
#include "semnet/parallel.hpp"

namespace semnet {
namespace {

// Unweighted BFS from a source index; returns levels (-1 = unreachable) and
// the eccentricity.
int bfs_levels(const WeightedGraph& g, std::size_t source, std::vector<int>& level) {
  level.assign(g.node_count(), -1);
  std::queue<std::size_t> queue;
  level[source] = 0;
  queue.push(source);
  int ecc = 0;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop();
    for (const auto& nb : g.neighbors_at(u)) {
      std::size_t v = g.index_of(nb.id);
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        ecc = std::max(ecc, level[v]);
        queue.push(v);
      }
    }
  }
  return ecc;
}

void require_connected(const std::vector<int>& level) {
  for (int l : level)
    if (l < 0) throw Error(ErrorCode::Disconnected, "diameter requires a connected graph");
}

std::size_t farthest(const std::vector<int>& level) {
  return static_cast<std::size_t>(
      std::max_element(level.begin(), level.end()) - level.begin());
}

void validate(const SpreadParams& p) {
  if (!(p.initial_activation > 0.0))
    throw Error(ErrorCode::InvalidArgument, "initial_activation must be positive");
  if (p.time_steps < 1) throw Error(ErrorCode::InvalidArgument, "time_steps must be >= 1");
  if (!(p.retention >= 0.0 && p.retention <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "retention must be in [0, 1]");
  if (!(p.decay >= 0.0 && p.decay <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "decay must be in [0, 1]");
  if (!(p.suppress >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "suppress must be non-negative");
}

}  // namespace

SpreadParams default_spread_params(const WeightedGraph& g, int diameter_hops) {
  SpreadParams p;
  p.initial_activation = static_cast<double>(g.node_count());
  p.time_steps = 2 * std::max(diameter_hops, 1);
  return p;
}

DiameterResult diameter(const WeightedGraph& g, DiameterMode mode) {
  if (g.empty()) throw Error(ErrorCode::EmptyGraph, "diameter of an empty graph");
  const std::size_t n = g.node_count();
  DiameterResult result;
  std::vector<int> level;

  if (n == 1) return {0, true, 0};

  if (mode == DiameterMode::exact) {
    for (std::size_t i = 0; i < n; ++i) {
      int ecc = bfs_levels(g, i, level);
      if (i == 0) require_connected(level);
      result.value = std::max(result.value, ecc);
      ++result.bfs_runs;
    }
    result.certified = true;
    return result;
  }

  // Double sweep from a max-degree node, then iFUB from the midpoint of the
  // sweep path, descending levels until lb > 2(i-1) certifies exactness.
  std::size_t start = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (g.degree_at(i) > g.degree_at(start)) start = i;

  bfs_levels(g, start, level);
  require_connected(level);
  ++result.bfs_runs;
  std::size_t a = farthest(level);

  std::vector<int> level_a;
  int ecc_a = bfs_levels(g, a, level_a);
  ++result.bfs_runs;
  std::size_t b = farthest(level_a);
  int lb = ecc_a;

  // Midpoint of an a-b shortest path: walk parents from b.
  std::size_t mid = b;
  {
    std::vector<std::size_t> parent(n, n);
    std::queue<std::size_t> queue;
    std::vector<int> lv(n, -1);
    lv[a] = 0;
    queue.push(a);
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop();
      for (const auto& nb : g.neighbors_at(u)) {
        std::size_t v = g.index_of(nb.id);
        if (lv[v] < 0) {
          lv[v] = lv[u] + 1;
          parent[v] = u;
          queue.push(v);
        }
      }
    }
    ++result.bfs_runs;
    for (int hops = lv[b] / 2; hops > 0; --hops) mid = parent[mid];
  }

  std::vector<int> level_mid;
  int ecc_mid = bfs_levels(g, mid, level_mid);
  ++result.bfs_runs;
  lb = std::max(lb, ecc_mid);

  std::vector<std::vector<std::size_t>> fringe(static_cast<std::size_t>(ecc_mid) + 1);
  for (std::size_t i = 0; i < n; ++i) fringe[static_cast<std::size_t>(level_mid[i])].push_back(i);

  for (int i = ecc_mid; i > 0; --i) {
    if (lb > 2 * (i - 1)) break;  // no deeper node can beat lb
    for (std::size_t v : fringe[static_cast<std::size_t>(i)]) {
      lb = std::max(lb, bfs_levels(g, v, level));
      ++result.bfs_runs;
    }
  }

  result.value = lb;
  result.certified = true;
  return result;
}

ActivationVector spread(const WeightedGraph& g, NodeId prime, const SpreadParams& p) {
  validate(p);
  if (!g.has_node(prime)) throw Error(ErrorCode::UnknownPrime, "prime is not a node of the layer");

  const std::size_t n = g.node_count();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  a(static_cast<Eigen::Index>(g.index_of(prime))) = p.initial_activation;

  Eigen::VectorXd next(static_cast<Eigen::Index>(n));
  for (int step = 0; step < p.time_steps; ++step) {
    // Receiver-centric accumulation over sorted neighbour lists keeps the
    // floating-point summation order fixed.
    for (std::size_t i = 0; i < n; ++i) {
      double acc = g.degree_at(i) == 0 ? a(static_cast<Eigen::Index>(i))
                                       : p.retention * a(static_cast<Eigen::Index>(i));
      for (const auto& nb : g.neighbors_at(i)) {
        std::size_t j = g.index_of(nb.id);
        acc += (1.0 - p.retention) * a(static_cast<Eigen::Index>(j)) * nb.weight /
               g.strength_at(j);
      }
      next(static_cast<Eigen::Index>(i)) = acc;
    }
    if (p.decay > 0.0) next *= 1.0 - p.decay;
    if (p.suppress > 0.0)
      next = (next.array() < p.suppress).select(Eigen::VectorXd::Zero(next.size()), next);
    a.swap(next);
  }

  ActivationVector out;
  out.prime = prime;
  out.params = p;
  out.values = std::move(a);
  return out;
}

ActivationMatrix activation_matrix(const WeightedGraph& g, const StringTable& words,
                                   std::span<const std::string> primes,
                                   std::span<const std::string> targets, const SpreadParams& p,
                                   int threads) {
  validate(p);
  ActivationMatrix m;
  m.params = p;

  std::vector<NodeId> prime_ids;
  for (const auto& word : primes) {
    auto id = words.find(word);
    if (id && g.has_node(*id)) {
      m.primes.push_back(word);
      prime_ids.push_back(*id);
    } else {
      m.missing_primes.push_back(word);
    }
  }
  if (prime_ids.empty())
    throw Error(ErrorCode::NoPrimesPresent, "no prime word is present in the layer");

  std::vector<std::size_t> target_idx;
  for (const auto& word : targets) {
    auto id = words.find(word);
    if (id && g.has_node(*id)) {
      m.targets.push_back(word);
      target_idx.push_back(g.index_of(*id));
    } else {
      m.missing_targets.push_back(word);
    }
  }

  m.values.resize(static_cast<Eigen::Index>(prime_ids.size()),
                  static_cast<Eigen::Index>(target_idx.size()));
  parallel_for(prime_ids.size(), threads, [&](std::size_t row) {
    ActivationVector v = spread(g, prime_ids[row], p);
    for (std::size_t col = 0; col < target_idx.size(); ++col)
      m.values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          v.values(static_cast<Eigen::Index>(target_idx[col]));
  });
  return m;
}

std::string activation_matrix_csv(const ActivationMatrix& m) {
  std::ostringstream out;
  out << "prime";
  for (const auto& t : m.targets) out << ',' << t;
  out << '\n';
  for (Eigen::Index row = 0; row < m.values.rows(); ++row) {
    out << m.primes[static_cast<std::size_t>(row)];
    for (Eigen::Index col = 0; col < m.values.cols(); ++col)
      out << ',' << format_double(m.values(row, col));
    out << '\n';
  }
  return out.str();
}

}  // namespace semnet
