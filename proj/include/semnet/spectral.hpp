// Von Neumann entropy of graph layers and Jensen-Shannon distance between
// them, the numeric core of the reducibility analysis.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "semnet/graph.hpp"

namespace semnet {

// Eigenvalues below this are treated as exact zeros before the entropy sum,
// so floating-point noise near 0 cannot produce log of a negative number.
inline constexpr double kEigenvalueClamp = 1e-12;

// rho = L / trace(L) with L = D - A, the weighted combinatorial Laplacian on
// an aligned node order. Symmetric, unit trace, eigenvalues in [0, 1].
struct DensityMatrix {
  Eigen::SparseMatrix<double> rho;

  Eigen::Index size() const { return rho.rows(); }
};

enum class EntropyMethod { exact, estimated };

struct SpectralSummary {
  std::vector<double> eigenvalues;  // exact method only; ascending
  double entropy_bits = 0.0;
  EntropyMethod method = EntropyMethod::exact;
  std::optional<double> estimator_error;  // standard error (estimated only)
};

struct SlqOptions {
  int probes = 32;     // Rademacher probe vectors
  int depth = 80;      // Lanczos iterations (full reorthogonalization)
  std::uint64_t seed = 0;
  int threads = 1;
};

// -x * log2(x) with the clamp rule; 0 log 0 := 0.
template <class Scalar>
Scalar entropy_term(Scalar x) {
  if (x < Scalar(kEigenvalueClamp)) return Scalar(0);
  return -x * std::log2(x);
}

// Entropy in bits from an eigenvalue vector (any dense Eigen expression).
template <class Derived>
double entropy_bits_from_eigenvalues(const Eigen::DenseBase<Derived>& eigenvalues) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    h += entropy_term(static_cast<double>(eigenvalues.derived()(i)));
  return h < 0.0 ? 0.0 : h;
}

// node_order is the aligned node list; nodes of g must all appear in it.
// Padding nodes absent from g contribute zero rows/columns.
DensityMatrix density_matrix(const WeightedGraph& g, std::span<const NodeId> node_order);

// Exact path: dense symmetric eigendecomposition of rho.
SpectralSummary exact_entropy(const DensityMatrix& rho);

// Estimated path: stochastic Lanczos quadrature, deterministic given the
// seed (independent of thread count).
SpectralSummary slq_entropy(const DensityMatrix& rho, const SlqOptions& opts);

SpectralSummary von_neumann_entropy(const DensityMatrix& rho, EntropyMethod method,
                                    const SlqOptions& opts = {});

// D = sqrt( h((rho1+rho2)/2) - (h(rho1)+h(rho2))/2 ), base-2 logs; the tiny
// negative radicands that roundoff produces are clamped to 0.
double js_distance(const DensityMatrix& a, const DensityMatrix& b,
                   EntropyMethod method = EntropyMethod::exact, const SlqOptions& opts = {});

}  // namespace semnet
