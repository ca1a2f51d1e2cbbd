#include "emvgc/spectral.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace emvgc {

Embedding embed(const AnchorGraph& graph, int k, EmbedScaling scaling) {
  const int m = graph.m();
  const int n = graph.n();
  if (k < 1 || k > m) {
    throw Error("invalid-hyperparams", "need 1 <= k <= m");
  }
  linalg::Svd svd = linalg::economy_svd(graph.Z);
  const int rank_limit = std::min<int>(static_cast<int>(svd.S.size()), k);

  Embedding out;
  out.H = Matrix::Zero(n, k);
  int usable = 0;
  for (int j = 0; j < rank_limit; ++j) {
    if (svd.S[j] > 1e-12) ++usable;
  }
  out.rank_deficient = usable < k;
  for (int j = 0; j < usable; ++j) {
    Vector v = svd.V.col(j);
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    switch (scaling) {
      case EmbedScaling::kNone:
        break;
      case EmbedScaling::kSigma:
        v *= svd.S[j];
        break;
      case EmbedScaling::kSqrtSigma:
        v *= std::sqrt(svd.S[j]);
        break;
    }
    out.H.col(j) = v;
  }
  return out;
}

namespace {

// Squared distances from every point to one center.
Vector sq_dist_to(const Matrix& points, const Vector& center) {
  return (points.rowwise() - center.transpose()).rowwise().squaredNorm();
}

Matrix kmeanspp_seed(const Matrix& points, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(points.rows());
  Matrix centers(k, points.cols());
  std::uniform_int_distribution<int> first(0, n - 1);
  centers.row(0) = points.row(first(rng));
  Vector d2 = sq_dist_to(points, centers.row(0).transpose());
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    int chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (int i = 0; i < n; ++i) {
        r -= d2[i];
        if (r <= 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = first(rng);
    }
    centers.row(c) = points.row(chosen);
    d2 = d2.cwiseMin(sq_dist_to(points, centers.row(c).transpose()));
  }
  return centers;
}

KmeansResult lloyd(const Matrix& points, int k, Matrix centers, int max_iters,
                   double rel_tol) {
  const int n = static_cast<int>(points.rows());
  KmeansResult res;
  res.labels.assign(n, 0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    // Assignment step.
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      res.labels[i] = best_c;
      inertia += best;
    }
    // Update step.
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(res.labels[i]) += points.row(i);
      counts[res.labels[i]]++;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / counts[c];
      } else {
        // Reseed to the point farthest from its assigned center.
        double worst = -1.0;
        int worst_i = 0;
        for (int i = 0; i < n; ++i) {
          const double d =
              (points.row(i) - centers.row(res.labels[i])).squaredNorm();
          if (d > worst) {
            worst = d;
            worst_i = i;
          }
        }
        centers.row(c) = points.row(worst_i);
      }
    }
    if (std::abs(prev_inertia - inertia) <= rel_tol * (1.0 + inertia)) {
      prev_inertia = inertia;
      break;
    }
    prev_inertia = inertia;
  }
  // Final assignment against the last centers.
  res.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (int c = 0; c < k; ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    res.labels[i] = best_c;
    res.inertia += best;
  }
  res.centers = std::move(centers);
  return res;
}

}  // namespace

KmeansResult kmeans_points(const Matrix& points, int k, int restarts,
                           std::uint64_t seed, int max_iters, double rel_tol) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || restarts < 1) {
    throw Error("invalid-hyperparams", "need k >= 1 and restarts >= 1");
  }
  if (k > n) {
    throw Error("degenerate-input",
                "k=" + std::to_string(k) + " exceeds " + std::to_string(n) +
                    " points");
  }
  std::set<std::vector<double>> distinct;
  for (int i = 0; i < n && static_cast<int>(distinct.size()) < k; ++i) {
    distinct.insert(std::vector<double>(points.row(i).begin(), points.row(i).end()));
  }
  if (static_cast<int>(distinct.size()) < k) {
    throw Error("degenerate-input", "fewer than k distinct points");
  }

  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r) * 0x9E3779B97F4A7C15ull);
    KmeansResult cur = lloyd(points, k, kmeanspp_seed(points, k, rng), max_iters,
                             rel_tol);
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

KmeansResult kmeans(const Embedding& embedding, int k, int restarts,
                    std::uint64_t seed) {
  return kmeans_points(embedding.H, k, restarts, seed);
}

}  // namespace emvgc
