#pragma once

#include "emvgc/optimizer.hpp"
#include "emvgc/types.hpp"

namespace emvgc {

/// Global-only baseline: anchors fixed (k-means centers per view by default),
/// one batch simplex-QP pass with Q = sum_p A^T A + mu I and
/// f_i = -sum_p A^T X_{:,i}. No alternation.
OptimizerState fit_global(const MultiViewDataset& dataset, const HyperParams& params);

/// Local-only baseline with fixed anchors: per column, closed form
/// z_i = project_simplex(-d_i / (2 mu1)) for mu1 > 0, one-hot on the nearest
/// anchor (lowest index on ties) for mu1 = 0, where d_i sums squared
/// anchor distances across views. Uses params.mu as mu1.
OptimizerState fit_local(const MultiViewDataset& dataset, const HyperParams& params);

/// Cross-view summed squared distance matrix d (m x n): d_ji = sum_p
/// ||x_i^(p) - a_j^(p)||^2.
Matrix anchor_distances(const MultiViewDataset& dataset, const AnchorSet& anchors);

}  // namespace emvgc
