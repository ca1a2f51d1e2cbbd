#include "emvgc/baselines.hpp"

#include "emvgc/simplex_qp.hpp"

namespace emvgc {

namespace {

AnchorSet baseline_anchors(const MultiViewDataset& dataset, const HyperParams& params) {
  // Baselines default to k-means anchors (the "Fixed" condition); a sample
  // init is still honored when requested explicitly.
  return init_anchors(dataset, params.m, params.anchor_init, params.seed);
}

double global_objective(const MultiViewDataset& dataset, const AnchorSet& anchors,
                        const AnchorGraph& graph, double mu) {
  double obj = mu * graph.Z.squaredNorm();
  for (std::size_t p = 0; p < dataset.views.size(); ++p) {
    obj += (dataset.views[p] - anchors.anchors[p] * graph.Z).squaredNorm();
  }
  return obj;
}

}  // namespace

Matrix anchor_distances(const MultiViewDataset& dataset, const AnchorSet& anchors) {
  const int m = anchors.m();
  const int n = dataset.n();
  Matrix d = Matrix::Zero(m, n);
  for (std::size_t p = 0; p < dataset.views.size(); ++p) {
    const Matrix& X = dataset.views[p];
    const Matrix& A = anchors.anchors[p];
    const Vector xn = X.colwise().squaredNorm().transpose();  // n
    const Vector an = A.colwise().squaredNorm().transpose();  // m
    d += (an.replicate(1, n) + xn.transpose().replicate(m, 1) -
          2.0 * A.transpose() * X);
  }
  return d.cwiseMax(0.0);
}

OptimizerState fit_global(const MultiViewDataset& dataset, const HyperParams& params) {
  validate(dataset);
  validate(params);
  OptimizerState state;
  state.anchors = baseline_anchors(dataset, params);
  const int m = params.m;
  Matrix Q = params.mu * Matrix::Identity(m, m);
  Matrix F = Matrix::Zero(m, dataset.n());
  for (std::size_t p = 0; p < dataset.views.size(); ++p) {
    const Matrix& A = state.anchors.anchors[p];
    Q += A.transpose() * A;
    F -= A.transpose() * dataset.views[p];
  }
  state.graph.Z = solve_batch(Q, F, params.qp_tol, params.qp_max_iters,
                              params.threads);
  state.iterations = 1;
  state.objective_trace.push_back(
      global_objective(dataset, state.anchors, state.graph, params.mu));
  return state;
}

OptimizerState fit_local(const MultiViewDataset& dataset, const HyperParams& params) {
  validate(dataset);
  if (params.mu < 0.0) {
    throw Error("invalid-hyperparams", "mu1 must be >= 0");
  }
  OptimizerState state;
  state.anchors = baseline_anchors(dataset, params);
  const Matrix d = anchor_distances(dataset, state.anchors);
  const double mu1 = params.mu;
  const int m = params.m;
  const int n = dataset.n();
  state.graph.Z = Matrix::Zero(m, n);
  for (int i = 0; i < n; ++i) {
    if (mu1 > 0.0) {
      state.graph.Z.col(i) = project_simplex(-d.col(i) / (2.0 * mu1));
    } else {
      Eigen::Index jmin = 0;
      d.col(i).minCoeff(&jmin);
      state.graph.Z(jmin, i) = 1.0;
    }
  }
  state.iterations = 1;
  state.objective_trace.push_back(
      (d.cwiseProduct(state.graph.Z)).sum() + mu1 * state.graph.Z.squaredNorm());
  return state;
}

}  // namespace emvgc
