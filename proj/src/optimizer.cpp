#include "emvgc/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "emvgc/spectral.hpp"

namespace emvgc {

namespace {

void check_shapes(const MultiViewDataset& dataset, const AnchorSet& anchors) {
  if (dataset.views.size() != anchors.anchors.size()) {
    throw Error("shape-mismatch", "view count differs between data and anchors");
  }
  for (std::size_t p = 0; p < dataset.views.size(); ++p) {
    if (dataset.views[p].rows() != anchors.anchors[p].rows()) {
      throw Error("shape-mismatch",
                  "feature dimension differs in view " + std::to_string(p));
    }
    if (anchors.anchors[p].cols() != anchors.anchors[0].cols()) {
      throw Error("shape-mismatch", "anchor counts differ across views");
    }
  }
}

void check_shapes(const MultiViewDataset& dataset, const AnchorSet& anchors,
                  const AnchorGraph& graph) {
  check_shapes(dataset, anchors);
  if (graph.Z.rows() != anchors.m() || graph.Z.cols() != dataset.n()) {
    throw Error("shape-mismatch", "anchor graph is not m x n");
  }
}

}  // namespace

LocalAffinity local_affinity(const AnchorSet& anchors) {
  LocalAffinity aff;
  aff.q.reserve(anchors.anchors.size());
  for (const Matrix& A : anchors.anchors) {
    aff.q.push_back(A.colwise().squaredNorm().transpose());
  }
  return aff;
}

double objective(const MultiViewDataset& dataset, const AnchorSet& anchors,
                 const AnchorGraph& graph, double lambda, double mu) {
  check_shapes(dataset, anchors, graph);
  const Matrix& Z = graph.Z;
  const Vector row_mass = Z.rowwise().sum();  // Z 1
  double obj = mu * Z.squaredNorm();
  for (std::size_t p = 0; p < dataset.views.size(); ++p) {
    const Matrix& X = dataset.views[p];
    const Matrix& A = anchors.anchors[p];
    const Matrix G = A.transpose() * A;
    obj += (Z.cwiseProduct(G * Z)).sum();             // tr(Z^T A^T A Z)
    obj -= 2.0 * ((A.transpose() * X).cwiseProduct(Z)).sum();
    obj += lambda * G.diagonal().dot(row_mass);       // tr(A diag(Z1) A^T)
  }
  if (!std::isfinite(obj)) {
    throw Error("non-finite-entry", "objective is not finite");
  }
  return obj;
}

AnchorSet update_anchors(const MultiViewDataset& dataset, const AnchorGraph& graph,
                         double lambda) {
  const Matrix& Z = graph.Z;
  const int m = graph.m();
  Matrix G = Z * Z.transpose();
  G.diagonal() += lambda * Z.rowwise().sum();
  const double jitter = 1e-10 * G.trace() / m;
  G.diagonal().array() += jitter;

  AnchorSet out;
  out.anchors.reserve(dataset.views.size());
  Eigen::LDLT<Matrix> ldlt(G);
  if (ldlt.info() != Eigen::Success) {
    throw Error("singular-system", "anchor-update system is singular");
  }
  for (const Matrix& X : dataset.views) {
    Matrix A = ldlt.solve((X * Z.transpose()).transpose()).transpose();
    if (!A.allFinite()) {
      throw Error("singular-system", "anchor update produced non-finite values");
    }
    out.anchors.push_back(std::move(A));
  }
  return out;
}

AnchorGraph update_graph(const MultiViewDataset& dataset, const AnchorSet& anchors,
                         double lambda, double mu, double qp_tol, int qp_max_iters,
                         int threads) {
  check_shapes(dataset, anchors);
  const int m = anchors.m();
  const int n = dataset.n();
  Matrix Q = mu * Matrix::Identity(m, m);
  Matrix F = Matrix::Zero(m, n);
  const LocalAffinity aff = local_affinity(anchors);
  for (std::size_t p = 0; p < dataset.views.size(); ++p) {
    const Matrix& A = anchors.anchors[p];
    Q += A.transpose() * A;
    F -= A.transpose() * dataset.views[p];
    F.colwise() += 0.5 * lambda * aff.q[p];
  }
  AnchorGraph graph;
  graph.Z = solve_batch(Q, F, qp_tol, qp_max_iters, threads);
  return graph;
}

AnchorSet init_anchors(const MultiViewDataset& dataset, int m, AnchorInit init,
                       std::uint64_t seed) {
  const int n = dataset.n();
  if (m > n) {
    throw Error("invalid-hyperparams", "anchor count exceeds sample count");
  }
  AnchorSet out;
  if (init == AnchorInit::kSample) {
    // One shared sample of column indices, without replacement.
    std::mt19937_64 rng(seed);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int j = 0; j < m; ++j) {
      std::uniform_int_distribution<int> pick(j, n - 1);
      std::swap(idx[j], idx[pick(rng)]);
    }
    for (const Matrix& X : dataset.views) {
      Matrix A(X.rows(), m);
      for (int j = 0; j < m; ++j) A.col(j) = X.col(idx[j]);
      out.anchors.push_back(std::move(A));
    }
  } else {
    for (std::size_t p = 0; p < dataset.views.size(); ++p) {
      const Matrix& X = dataset.views[p];
      KmeansResult km = kmeans_points(X.transpose(), m, /*restarts=*/1,
                                      seed + 1000003 * p);
      out.anchors.push_back(km.centers.transpose());
    }
  }
  return out;
}

OptimizerState fit(const MultiViewDataset& dataset, const HyperParams& params,
                   bool check_convergence) {
  validate(dataset);
  validate(params);
  if (params.m > dataset.n()) {
    throw Error("invalid-hyperparams", "need m <= n");
  }
  const auto now = [] { return std::chrono::steady_clock::now(); };
  const auto seconds = [](auto a, auto b) {
    return std::chrono::duration<double>(b - a).count();
  };
  OptimizerState state;
  auto t0 = now();
  state.anchors = init_anchors(dataset, params.m, params.anchor_init, params.seed);
  state.timings["init"] = seconds(t0, now());
  // Uniform feasible Z for the initial objective value only; the first real Z
  // comes from the first update_graph call.
  state.graph.Z =
      Matrix::Constant(params.m, dataset.n(), 1.0 / params.m);
  state.objective_trace.push_back(
      objective(dataset, state.anchors, state.graph, params.lambda, params.mu));

  for (int it = 0; it < params.max_outer_iters; ++it) {
    t0 = now();
    state.graph = update_graph(dataset, state.anchors, params.lambda, params.mu,
                               params.qp_tol, params.qp_max_iters, params.threads);
    auto t1 = now();
    state.anchors = update_anchors(dataset, state.graph, params.lambda);
    auto t2 = now();
    state.timings["z_update"] += seconds(t0, t1);
    state.timings["a_update"] += seconds(t1, t2);
    const double obj =
        objective(dataset, state.anchors, state.graph, params.lambda, params.mu);
    const double prev = state.objective_trace.back();
    state.objective_trace.push_back(obj);
    state.iterations = it + 1;
    if (check_convergence &&
        std::abs(prev - obj) < params.rel_tol * (1.0 + std::abs(prev))) {
      break;
    }
  }
  return state;
}

double local_objective(const MultiViewDataset& dataset, const AnchorSet& anchors,
                       const AnchorGraph& graph, double mu1) {
  check_shapes(dataset, anchors, graph);
  const Matrix& Z = graph.Z;
  const Vector col_mass = Z.colwise().sum().transpose();
  const Vector row_mass = Z.rowwise().sum();
  double obj = mu1 * Z.squaredNorm();
  const LocalAffinity aff = local_affinity(anchors);
  for (std::size_t p = 0; p < dataset.views.size(); ++p) {
    const Matrix& X = dataset.views[p];
    const Matrix& A = anchors.anchors[p];
    // sum_ij ||x_i - a_j||^2 z_ji
    obj += X.colwise().squaredNorm().dot(col_mass.transpose());
    obj += aff.q[p].dot(row_mass);
    obj -= 2.0 * ((A.transpose() * X).cwiseProduct(Z)).sum();
  }
  return obj;
}

Proposition1Check check_proposition1(const MultiViewDataset& dataset,
                                     const AnchorSet& anchors,
                                     const AnchorGraph& graph, double lambda,
                                     double mu) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error("invalid-hyperparams", "lambda must lie in (0, 1]");
  }
  double x_energy = 0.0;
  for (const Matrix& X : dataset.views) x_energy += X.squaredNorm();
  Proposition1Check out;
  out.lhs = objective(dataset, anchors, graph, lambda, mu) + x_energy;
  out.rhs = lambda * local_objective(dataset, anchors, graph, mu / lambda);
  return out;
}

}  // namespace emvgc
