#include "semnet/spectral.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "semnet/parallel.hpp"

namespace semnet {
namespace {

// splitmix64: decorrelates per-probe seeds so probe i's stream is the same
// whichever thread runs it.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Rademacher vector from raw engine bits (one 64-bit word per 64 entries);
// avoids std::*_distribution whose output is implementation-defined.
Eigen::VectorXd rademacher(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  Eigen::VectorXd z(n);
  std::uint64_t word = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i % 64 == 0) word = engine();
    z(i) = (word >> (i % 64)) & 1 ? 1.0 : -1.0;
  }
  return z;
}

// One SLQ probe: Lanczos with full reorthogonalization from v = z/||z||,
// then n * sum_k tau_k^2 f(theta_k) over the tridiagonal eigenpairs.
double slq_probe(const Eigen::SparseMatrix<double>& rho, int depth, std::uint64_t seed) {
  const Eigen::Index n = rho.rows();
  const int m = static_cast<int>(std::min<Eigen::Index>(depth, n));

  Eigen::MatrixXd basis(n, m);
  Eigen::VectorXd alpha(m), beta(m);
  Eigen::VectorXd v = rademacher(n, seed);
  v /= v.norm();

  int steps = 0;
  Eigen::VectorXd w;
  for (int k = 0; k < m; ++k) {
    basis.col(k) = v;
    w = rho * v;
    alpha(k) = v.dot(w);
    w -= alpha(k) * v;
    if (k > 0) w -= beta(k - 1) * basis.col(k - 1);
    // Full reorthogonalization keeps the Ritz values clean at this scale.
    w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    steps = k + 1;
    const double norm = w.norm();
    if (!(norm > 1e-10)) break;  // invariant subspace reached
    beta(k) = norm;
    v = w / norm;
  }

  Eigen::MatrixXd tridiag = Eigen::MatrixXd::Zero(steps, steps);
  for (int k = 0; k < steps; ++k) {
    tridiag(k, k) = alpha(k);
    if (k + 1 < steps) tridiag(k, k + 1) = tridiag(k + 1, k) = beta(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tridiag);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "Lanczos tridiagonal eigensolve failed");

  double estimate = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double tau = solver.eigenvectors()(0, k);
    estimate += tau * tau * entropy_term(solver.eigenvalues()(k));
  }
  if (!std::isfinite(estimate))
    throw Error(ErrorCode::ConvergenceFailure, "SLQ probe produced a non-finite estimate");
  return static_cast<double>(n) * estimate;
}

double entropy_of(const DensityMatrix& rho, EntropyMethod method, const SlqOptions& opts) {
  return method == EntropyMethod::exact ? exact_entropy(rho).entropy_bits
                                        : slq_entropy(rho, opts).entropy_bits;
}

}  // namespace

DensityMatrix density_matrix(const WeightedGraph& g, std::span<const NodeId> node_order) {
  if (g.edge_count() == 0 || !(g.total_weight() > 0.0))
    throw Error(ErrorCode::NoEdges, "density matrix needs at least one positive-weight edge");

  std::unordered_map<NodeId, Eigen::Index> position;
  position.reserve(node_order.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(node_order.size()); ++i)
    position.emplace(node_order[i], i);

  const double trace = 2.0 * g.total_weight();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.edge_count() * 4);
  for (const auto& e : g.edges()) {
    auto ia = position.find(e.a);
    auto ib = position.find(e.b);
    if (ia == position.end() || ib == position.end())
      throw Error(ErrorCode::UnalignedLayers, "graph node missing from aligned node order");
    const double w = e.weight / trace;
    triplets.emplace_back(ia->second, ib->second, -w);
    triplets.emplace_back(ib->second, ia->second, -w);
    triplets.emplace_back(ia->second, ia->second, w);
    triplets.emplace_back(ib->second, ib->second, w);
  }

  DensityMatrix out;
  out.rho.resize(static_cast<Eigen::Index>(node_order.size()),
                 static_cast<Eigen::Index>(node_order.size()));
  out.rho.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SpectralSummary exact_entropy(const DensityMatrix& rho) {
  Eigen::MatrixXd dense(rho.rho);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "dense eigendecomposition failed");

  SpectralSummary out;
  out.method = EntropyMethod::exact;
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + solver.eigenvalues().size());
  for (double& lambda : out.eigenvalues)
    if (lambda < kEigenvalueClamp) lambda = 0.0;
  out.entropy_bits = entropy_bits_from_eigenvalues(solver.eigenvalues());
  return out;
}

SpectralSummary slq_entropy(const DensityMatrix& rho, const SlqOptions& opts) {
  if (opts.probes < 1 || opts.depth < 1)
    throw Error(ErrorCode::InvalidArgument, "SLQ needs at least one probe and unit depth");

  std::vector<double> estimates(static_cast<std::size_t>(opts.probes));
  parallel_for(estimates.size(), opts.threads, [&](std::size_t i) {
    estimates[i] = slq_probe(rho.rho, opts.depth, mix_seed(opts.seed, i));
  });

  const double mean =
      std::accumulate(estimates.begin(), estimates.end(), 0.0) / static_cast<double>(estimates.size());
  double variance = 0.0;
  for (double e : estimates) variance += (e - mean) * (e - mean);
  if (estimates.size() > 1) variance /= static_cast<double>(estimates.size() - 1);

  SpectralSummary out;
  out.method = EntropyMethod::estimated;
  out.entropy_bits = mean < 0.0 ? 0.0 : mean;
  out.estimator_error = std::sqrt(variance / static_cast<double>(estimates.size()));
  return out;
}

SpectralSummary von_neumann_entropy(const DensityMatrix& rho, EntropyMethod method,
                                    const SlqOptions& opts) {
  return method == EntropyMethod::exact ? exact_entropy(rho) : slq_entropy(rho, opts);
}

double js_distance(const DensityMatrix& a, const DensityMatrix& b, EntropyMethod method,
                   const SlqOptions& opts) {
  if (a.size() != b.size())
    throw Error(ErrorCode::UnalignedLayers, "density matrices have different aligned sizes");

  DensityMatrix mixture;
  mixture.rho = 0.5 * (a.rho + b.rho);
  const double h_mix = entropy_of(mixture, method, opts);
  const double h_a = entropy_of(a, method, opts);
  const double h_b = entropy_of(b, method, opts);
  const double radicand = h_mix - 0.5 * (h_a + h_b);
  return radicand > 0.0 ? std::sqrt(radicand) : 0.0;
}

}  // namespace semnet
