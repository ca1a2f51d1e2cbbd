#include "emvgc/types.hpp"

#include <set>

namespace emvgc {

void validate(const MultiViewDataset& dataset) {
  if (dataset.views.empty()) {
    throw Error("empty-view", "dataset has no views");
  }
  const Eigen::Index n = dataset.views[0].cols();
  if (n < 2) {
    throw Error("dimension-mismatch", "dataset needs at least 2 samples, got " +
                                          std::to_string(n));
  }
  for (std::size_t p = 0; p < dataset.views.size(); ++p) {
    const Matrix& X = dataset.views[p];
    if (X.rows() < 1) {
      throw Error("empty-view", "view " + std::to_string(p) + " has no features");
    }
    if (X.cols() != n) {
      throw Error("dimension-mismatch",
                  "view " + std::to_string(p) + " has " + std::to_string(X.cols()) +
                      " samples, expected " + std::to_string(n));
    }
    if (!X.allFinite()) {
      throw Error("non-finite-entry", "view " + std::to_string(p) +
                                          " contains a non-finite value");
    }
  }
  if (dataset.labels) {
    if (static_cast<Eigen::Index>(dataset.labels->size()) != n) {
      throw Error("dimension-mismatch",
                  "label vector length " + std::to_string(dataset.labels->size()) +
                      " does not match n=" + std::to_string(n));
    }
  }
}

void validate(const HyperParams& params) {
  if (!(params.lambda > 0.0 && params.lambda <= 1.0)) {
    throw Error("invalid-hyperparams", "lambda must lie in (0, 1]");
  }
  if (params.mu < 0.0) {
    throw Error("invalid-hyperparams", "mu must be >= 0");
  }
  if (params.k < 1 || params.m < params.k) {
    throw Error("invalid-hyperparams", "need 1 <= k <= m");
  }
  if (params.max_outer_iters < 1 || params.qp_max_iters < 1 ||
      params.kmeans_restarts < 1) {
    throw Error("invalid-hyperparams", "iteration counts must be positive");
  }
  if (params.rel_tol <= 0.0 || params.qp_tol <= 0.0) {
    throw Error("invalid-hyperparams", "tolerances must be positive");
  }
}

void validate(const AnchorGraph& graph) {
  if (!graph.Z.allFinite()) {
    throw Error("non-finite-entry", "anchor graph contains a non-finite value");
  }
  if ((graph.Z.array() < -1e-12).any()) {
    throw Error("invalid-graph", "anchor graph has negative entries");
  }
  for (Eigen::Index i = 0; i < graph.Z.cols(); ++i) {
    const double s = graph.Z.col(i).sum();
    if (std::abs(s - 1.0) > 1e-8) {
      throw Error("invalid-graph", "column " + std::to_string(i) +
                                       " sums to " + std::to_string(s));
    }
  }
}

namespace linalg {

Vector solve_symmetric(const Matrix& G, const Vector& b) {
  Eigen::LDLT<Matrix> ldlt(G);
  if (ldlt.info() != Eigen::Success) {
    throw Error("singular-system", "LDLT factorization failed");
  }
  return ldlt.solve(b);
}

Matrix solve_symmetric(const Matrix& G, const Matrix& B) {
  Eigen::LDLT<Matrix> ldlt(G);
  if (ldlt.info() != Eigen::Success) {
    throw Error("singular-system", "LDLT factorization failed");
  }
  return ldlt.solve(B);
}

Svd economy_svd(const Matrix& M) {
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return Svd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace linalg

}  // namespace emvgc
