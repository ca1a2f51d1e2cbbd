#pragma once

#include <cstdint>
#include <vector>

#include "emvgc/types.hpp"

namespace emvgc {

/// Sample embedding from the SVD of the anchor graph: rows index samples.
struct Embedding {
  Matrix H;  // n x k
  bool rank_deficient = false;
};

enum class EmbedScaling { kNone, kSigma, kSqrtSigma };

/// H = top-k right singular vectors of Z (m x n), singular values descending.
/// Sign convention: each vector's largest-magnitude entry is nonnegative.
/// Fewer than k singular values above 1e-12 zero-pads the remaining columns
/// and sets rank_deficient.
Embedding embed(const AnchorGraph& graph, int k,
                EmbedScaling scaling = EmbedScaling::kNone);

struct KmeansResult {
  std::vector<int> labels;
  Matrix centers;  // k x d
  double inertia = 0.0;
};

/// Lloyd iterations with k-means++ seeding, best inertia over restarts
/// (ties to the lowest restart index). Empty clusters are reseeded to the
/// point farthest from its center. points is n x d (rows = samples).
KmeansResult kmeans_points(const Matrix& points, int k, int restarts,
                           std::uint64_t seed, int max_iters = 100,
                           double rel_tol = 1e-6);

/// kmeans on an embedding's rows.
KmeansResult kmeans(const Embedding& embedding, int k, int restarts,
                    std::uint64_t seed);

}  // namespace emvgc
