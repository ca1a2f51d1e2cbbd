#pragma once

#include <optional>

#include "emvgc/types.hpp"

namespace emvgc {

/// min 1/2 z^T Q z + f^T z  s.t.  z >= 0, 1^T z = 1.
/// Q must be symmetric positive semidefinite.
struct SimplexQP {
  Matrix Q;
  Vector f;
};

struct QPResult {
  Vector z;
  bool converged = true;
  int iterations = 0;
};

/// Euclidean projection onto the probability simplex, exact sort-based method.
Vector project_simplex(const Vector& v);

/// Accelerated projected gradient with momentum restart. Step 1/L with L the
/// largest eigenvalue of Q (power iteration). Converged when the KKT residual
/// (stationarity violation + complementary slackness) drops below tol.
QPResult solve(const SimplexQP& problem, double tol = 1e-8, int max_iters = 1000,
               const std::optional<Vector>& warm_start = std::nullopt);

/// Solves one simplex QP per column of F, sharing the Lipschitz estimate of Q.
/// Throws Error("qp-not-converged") naming the first offending column.
/// threads > 1 splits columns across worker threads; output is identical to
/// the single-threaded result.
Matrix solve_batch(const Matrix& Q, const Matrix& F, double tol = 1e-8,
                   int max_iters = 1000, int threads = 1);

namespace detail {
/// Largest eigenvalue of symmetric PSD Q by power iteration.
double spectral_norm(const Matrix& Q);
/// KKT residual of z for (Q, f): max(0, -min_j g_j + nu) + |z.(g + nu)|
/// with nu estimated from coordinates carrying mass.
double kkt_residual(const Matrix& Q, const Vector& f, const Vector& z);
}  // namespace detail

}  // namespace emvgc
