#include "emvgc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace emvgc {

namespace {

void check_lengths(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) {
    throw Error("length-mismatch", "label vectors differ in length");
  }
  if (pred.empty()) {
    throw Error("length-mismatch", "empty label vectors");
  }
}

std::vector<int> compact(const std::vector<int>& labels, int& num_classes) {
  std::map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = remap.emplace(labels[i], static_cast<int>(remap.size())).first->second;
  }
  num_classes = static_cast<int>(remap.size());
  return out;
}

}  // namespace

ContingencyTable contingency(const std::vector<int>& pred,
                             const std::vector<int>& truth) {
  check_lengths(pred, truth);
  int kp = 0, kt = 0;
  const std::vector<int> p = compact(pred, kp);
  const std::vector<int> t = compact(truth, kt);
  ContingencyTable table;
  table.counts = Eigen::MatrixXi::Zero(kp, kt);
  table.n = static_cast<int>(pred.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    table.counts(p[i], t[i])++;
  }
  return table;
}

// Potentials-based Hungarian algorithm, O(n^3).
std::vector<int> hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols()) {
    throw Error("non-square-input", "cost matrix must be square");
  }
  if (!cost.allFinite()) {
    throw Error("non-finite-input", "cost matrix has non-finite entries");
  }
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  ContingencyTable table = contingency(pred, truth);
  const int k = std::max<int>(table.counts.rows(), table.counts.cols());
  Matrix cost = Matrix::Zero(k, k);
  cost.topLeftCorner(table.counts.rows(), table.counts.cols()) =
      -table.counts.cast<double>();
  const std::vector<int> match = hungarian(cost);
  double matched = 0.0;
  for (int i = 0; i < table.counts.rows(); ++i) {
    if (match[i] < table.counts.cols()) {
      matched += table.counts(i, match[i]);
    }
  }
  return matched / table.n;
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  ContingencyTable table = contingency(pred, truth);
  const double n = table.n;
  const Eigen::VectorXi row = table.counts.rowwise().sum();
  const Eigen::VectorXi col = table.counts.colwise().sum();
  double h_pred = 0.0, h_truth = 0.0, mi = 0.0;
  for (int i = 0; i < row.size(); ++i) {
    if (row[i] > 0) h_pred -= row[i] / n * std::log(row[i] / n);
  }
  for (int j = 0; j < col.size(); ++j) {
    if (col[j] > 0) h_truth -= col[j] / n * std::log(col[j] / n);
  }
  for (int i = 0; i < table.counts.rows(); ++i) {
    for (int j = 0; j < table.counts.cols(); ++j) {
      const int c = table.counts(i, j);
      if (c > 0) {
        mi += c / n * std::log(c * n / (static_cast<double>(row[i]) * col[j]));
      }
    }
  }
  if (h_pred <= 0.0 || h_truth <= 0.0) {
    // Both partitions trivial: identical-up-to-relabel iff both single-class.
    return (h_pred <= 0.0 && h_truth <= 0.0) ? 1.0 : 0.0;
  }
  const double value = mi / std::sqrt(h_pred * h_truth);
  return std::clamp(value, 0.0, 1.0);
}

double fscore(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_lengths(pred, truth);
  if (pred.size() < 2) {
    throw Error("length-mismatch", "pairwise Fscore needs at least 2 samples");
  }
  ContingencyTable table = contingency(pred, truth);
  auto pairs = [](double c) { return c * (c - 1.0) / 2.0; };
  double same_both = 0.0;
  for (int i = 0; i < table.counts.rows(); ++i) {
    for (int j = 0; j < table.counts.cols(); ++j) {
      same_both += pairs(table.counts(i, j));
    }
  }
  double same_pred = 0.0, same_truth = 0.0;
  const Eigen::VectorXi row = table.counts.rowwise().sum();
  const Eigen::VectorXi col = table.counts.colwise().sum();
  for (int i = 0; i < row.size(); ++i) same_pred += pairs(row[i]);
  for (int j = 0; j < col.size(); ++j) same_truth += pairs(col[j]);
  const double precision = same_pred > 0.0 ? same_both / same_pred : 1.0;
  const double recall = same_truth > 0.0 ? same_both / same_truth : 1.0;
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace emvgc
