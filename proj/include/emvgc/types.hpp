#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace emvgc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown for any contract violation; `code` is a stable machine-readable tag
/// (e.g. "dimension-mismatch", "non-finite-entry", "singular-system").
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Multi-view data: v matrices of shape d_p x n (features x samples) over the
/// same n samples, with optional ground-truth labels.
struct MultiViewDataset {
  std::vector<Matrix> views;
  std::optional<std::vector<int>> labels;

  int n() const { return views.empty() ? 0 : static_cast<int>(views[0].cols()); }
  int num_views() const { return static_cast<int>(views.size()); }
};

/// Per-view anchor matrices A^(p), each d_p x m.
struct AnchorSet {
  std::vector<Matrix> anchors;

  int m() const { return anchors.empty() ? 0 : static_cast<int>(anchors[0].cols()); }
};

/// Consensus anchor graph Z (m x n); columns lie on the probability simplex.
struct AnchorGraph {
  Matrix Z;

  int m() const { return static_cast<int>(Z.rows()); }
  int n() const { return static_cast<int>(Z.cols()); }
};

enum class AnchorInit { kSample, kKmeans };

struct HyperParams {
  double lambda = 0.1;   // local/global tradeoff, in (0, 1]
  double mu = 1.0;       // ridge regularizer, >= 0
  int m = 5;             // anchor count
  int k = 5;             // cluster count
  int max_outer_iters = 50;
  double rel_tol = 1e-6;
  double qp_tol = 1e-8;
  int qp_max_iters = 1000;
  std::uint64_t seed = 0;
  AnchorInit anchor_init = AnchorInit::kSample;
  int kmeans_restarts = 10;
  int threads = 1;
};

struct RunReport {
  std::vector<int> labels;
  Matrix embedding;  // n x k
  std::vector<double> objective_trace;
  std::optional<double> acc, nmi, fscore;
  std::map<std::string, double> timings;
  int iterations = 0;
};

/// Throws unless all MultiViewDataset invariants hold: at least one view, all
/// views share n >= 2 columns, every view has >= 1 feature row, all entries
/// finite, and labels (if present) have length n with every class nonempty.
void validate(const MultiViewDataset& dataset);

/// Throws unless params are self-consistent (0 < lambda <= 1, mu >= 0,
/// 1 <= k <= m, positive iteration counts and tolerances).
void validate(const HyperParams& params);

/// Throws unless Z >= 0 and every column sums to 1 within 1e-8.
void validate(const AnchorGraph& graph);

namespace linalg {

/// Solves G x = b for symmetric positive (semi)definite G via LDLT.
/// Throws Error("singular-system") when the factorization reports failure.
Vector solve_symmetric(const Matrix& G, const Vector& b);
Matrix solve_symmetric(const Matrix& G, const Matrix& B);

/// Economy SVD M = U S V^T with singular values descending.
struct Svd {
  Matrix U;
  Vector S;
  Matrix V;
};
Svd economy_svd(const Matrix& M);

}  // namespace linalg

}  // namespace emvgc
