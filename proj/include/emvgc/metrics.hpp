#pragma once

#include <vector>

#include "emvgc/types.hpp"

namespace emvgc {

/// k_pred x k_true joint count table over compacted label ids.
struct ContingencyTable {
  Eigen::MatrixXi counts;
  int n = 0;
};

ContingencyTable contingency(const std::vector<int>& pred,
                             const std::vector<int>& truth);

/// Minimum-cost assignment on a square cost matrix (Hungarian algorithm).
/// Returns the column assigned to each row.
std::vector<int> hungarian(const Matrix& cost);

/// Fraction matched under the best bijection of predicted to true labels.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// I(pred; truth) / sqrt(H(pred) H(truth)), natural logs. Both entropies zero
/// gives 1 for identical-up-to-relabel partitions, else 0.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

/// Pairwise F1 over co-clustered sample pairs. Empty same-pred pair set gives
/// precision 1; empty same-truth set gives recall 1; P + R = 0 gives F = 0.
double fscore(const std::vector<int>& pred, const std::vector<int>& truth);

}  // namespace emvgc
