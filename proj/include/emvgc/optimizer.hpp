#pragma once

#include "emvgc/simplex_qp.hpp"
#include "emvgc/types.hpp"

namespace emvgc {

/// Per-view anchor squared norms q_j = ||A_{:,j}||^2 -- the rows of M^(p) are
/// all equal to this vector, so tr(M Z) = sum_i q . Z_{:,i}.
struct LocalAffinity {
  std::vector<Vector> q;  // one length-m vector per view
};

LocalAffinity local_affinity(const AnchorSet& anchors);

struct OptimizerState {
  AnchorSet anchors;
  AnchorGraph graph;
  std::vector<double> objective_trace;
  int iterations = 0;
  std::map<std::string, double> timings;  // seconds per stage
};

/// sum_p tr(Z^T A^T A Z) - 2 sum_p tr(X^T A Z)
///   + lambda sum_p tr(A diag(Z1) A^T) + mu tr(Z^T Z)
double objective(const MultiViewDataset& dataset, const AnchorSet& anchors,
                 const AnchorGraph& graph, double lambda, double mu);

/// Closed-form per-view minimizer A = X Z^T (Z Z^T + lambda diag(Z1))^{-1},
/// with a small diagonal jitter guarding rank-deficient graphs.
AnchorSet update_anchors(const MultiViewDataset& dataset, const AnchorGraph& graph,
                         double lambda);

/// Per-column simplex QP with Q = sum_p A^T A + mu I and
/// f_i = -(sum_p A^T X_{:,i} + (lambda/2) q_total).
AnchorGraph update_graph(const MultiViewDataset& dataset, const AnchorSet& anchors,
                         double lambda, double mu, double qp_tol,
                         int qp_max_iters = 1000, int threads = 1);

/// Alternating outer loop: initialize anchors, then per iteration update Z
/// followed by the anchors, until the relative objective change drops below
/// rel_tol or max_outer_iters is reached. Trace holds the initial objective
/// plus one value per iteration. check_convergence=false always runs the full
/// max_outer_iters (used by the scaling benchmark).
OptimizerState fit(const MultiViewDataset& dataset, const HyperParams& params,
                   bool check_convergence = true);

/// Anchor initialization shared with the baselines: seeded sample of m data
/// columns per view, or per-view k-means centers (m centers).
AnchorSet init_anchors(const MultiViewDataset& dataset, int m, AnchorInit init,
                       std::uint64_t seed);

struct Proposition1Check {
  double lhs;  // objective + sum_p tr(X^T X)
  double rhs;  // lambda * (local objective of the same A, Z with mu1 = mu/lambda)
};

/// Upper-bound check: lhs >= rhs - 1e-9 (1 + |lhs|) for lambda in (0, 1].
Proposition1Check check_proposition1(const MultiViewDataset& dataset,
                                     const AnchorSet& anchors,
                                     const AnchorGraph& graph, double lambda,
                                     double mu);

/// Eq.-(4)-style local objective at (A, Z):
/// sum_p sum_ij ||x_i - a_j||^2 z_ji + mu1 sum_ij z_ji^2.
double local_objective(const MultiViewDataset& dataset, const AnchorSet& anchors,
                       const AnchorGraph& graph, double mu1);

}  // namespace emvgc
