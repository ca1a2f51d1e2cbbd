#include "emvgc/simplex_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

namespace emvgc {

Vector project_simplex(const Vector& v) {
  if (!v.allFinite()) {
    throw Error("non-finite-input", "projection input contains non-finite values");
  }
  const int m = static_cast<int>(v.size());
  // Feasible points are their own projection; returning them unchanged makes
  // the map exactly idempotent instead of idempotent up to rounding.
  if (v.minCoeff() >= 0.0 && std::abs(v.sum() - 1.0) <= 1e-12) return v;
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  // theta from the largest prefix with u_j > (prefix_sum - 1) / j.
  double cumsum = 0.0;
  double theta = u[0] - 1.0;
  for (int j = 0; j < m; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / (j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

namespace detail {

double spectral_norm(const Matrix& Q) {
  const int m = static_cast<int>(Q.rows());
  Vector x = Vector::Ones(m) / std::sqrt(static_cast<double>(m));
  double lam = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vector y = Q * x;
    const double norm = y.norm();
    if (norm < 1e-300) return 0.0;
    y /= norm;
    const double next = y.dot(Q * y);
    if (std::abs(next - lam) <= 1e-10 * (1.0 + std::abs(next))) {
      lam = next;
      break;
    }
    lam = next;
    x = y;
  }
  return std::max(lam, 0.0);
}

double kkt_residual(const Matrix& Q, const Vector& f, const Vector& z) {
  const Vector g = Q * z + f;
  // Equality multiplier from active (mass-carrying) coordinates.
  double nu_num = 0.0, nu_den = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (z[j] > 1e-12) {
      nu_num += z[j] * g[j];
      nu_den += z[j];
    }
  }
  const double nu = nu_den > 0.0 ? -nu_num / nu_den : -g.minCoeff();
  const double stationarity = std::max(0.0, -((g.array() + nu).minCoeff()));
  const double slackness = std::abs(z.dot(g.array().matrix() + Vector::Constant(z.size(), nu)));
  return stationarity + slackness;
}

}  // namespace detail

namespace {

void check_problem(const Matrix& Q, const Vector& f) {
  if (Q.rows() != Q.cols() || Q.rows() != f.size()) {
    throw Error("invalid-problem", "Q/f shape mismatch");
  }
  if (!Q.allFinite() || !f.allFinite()) {
    throw Error("invalid-problem", "non-finite QP data");
  }
  const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * (1.0 + Q.cwiseAbs().maxCoeff())) {
    throw Error("invalid-problem", "Q is not symmetric");
  }
}

// One APG run with a precomputed Lipschitz constant.
QPResult solve_with_L(const Matrix& Q, const Vector& f, double L, double tol,
                      int max_iters, const std::optional<Vector>& warm_start) {
  const int m = static_cast<int>(Q.rows());
  Vector z = warm_start ? project_simplex(*warm_start)
                        : Vector::Constant(m, 1.0 / m);
  const double step = L > 0.0 ? 1.0 / L : 1.0;
  // Rounding keeps the KKT residual above roughly eps times the problem
  // scale, so cap the effective tolerance at that floor; otherwise badly
  // scaled problems (huge ridge terms) can never report convergence.
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() *
                       (1.0 + f.cwiseAbs().maxCoeff() + L);
  const double thresh = std::max(tol, floor);
  auto objective = [&](const Vector& w) {
    return 0.5 * w.dot(Q * w) + f.dot(w);
  };
  Vector y = z;
  Vector z_prev = z;
  double t = 1.0;
  double obj_prev = objective(z);
  QPResult result;
  for (int it = 0; it < max_iters; ++it) {
    Vector grad = Q * y + f;
    Vector z_next = project_simplex(y - step * grad);
    const double obj = objective(z_next);
    if (obj > obj_prev) {
      // Restart momentum from the last good iterate.
      y = z;
      t = 1.0;
      grad = Q * y + f;
      z_next = project_simplex(y - step * grad);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = z_next + ((t - 1.0) / t_next) * (z_next - z);
    t = t_next;
    z_prev = z;
    z = z_next;
    obj_prev = objective(z);
    result.iterations = it + 1;
    if (detail::kkt_residual(Q, f, z) <= thresh) {
      result.z = z;
      result.converged = true;
      return result;
    }
  }
  result.z = z;
  result.converged = detail::kkt_residual(Q, f, z) <= thresh;
  return result;
}

}  // namespace

QPResult solve(const SimplexQP& problem, double tol, int max_iters,
               const std::optional<Vector>& warm_start) {
  check_problem(problem.Q, problem.f);
  if (tol <= 0.0) throw Error("invalid-problem", "tol must be positive");
  const double L = detail::spectral_norm(problem.Q);
  return solve_with_L(problem.Q, problem.f, L, tol, max_iters, warm_start);
}

Matrix solve_batch(const Matrix& Q, const Matrix& F, double tol, int max_iters,
                   int threads) {
  if (Q.rows() != F.rows()) {
    throw Error("invalid-problem", "Q and F row counts differ");
  }
  check_problem(Q, F.col(0));
  const int n = static_cast<int>(F.cols());
  const double L = detail::spectral_norm(Q);
  Matrix Z(Q.rows(), n);
  std::vector<int> failed_col(std::max(threads, 1), -1);

  auto run_range = [&](int begin, int end, int slot) {
    for (int i = begin; i < end; ++i) {
      QPResult r = solve_with_L(Q, F.col(i), L, tol, max_iters, std::nullopt);
      Z.col(i) = r.z;
      if (!r.converged && failed_col[slot] < 0) failed_col[slot] = i;
    }
  };

  if (threads <= 1 || n < 2 * threads) {
    run_range(0, n, 0);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const int begin = w * chunk;
      const int end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end, w);
    }
    for (auto& th : pool) th.join();
  }

  for (int c : failed_col) {
    if (c >= 0) {
      throw Error("qp-not-converged",
                  "column " + std::to_string(c) + " exceeded max_iters");
    }
  }
  return Z;
}

}  // namespace emvgc
