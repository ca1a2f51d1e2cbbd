#pragma once

#include "emvgc/baselines.hpp"
#include "emvgc/data.hpp"
#include "emvgc/metrics.hpp"
#include "emvgc/optimizer.hpp"
#include "emvgc/spectral.hpp"

namespace emvgc {

/// The four experiment arms: the two single-structure baselines, the combined
/// objective with anchors frozen at their initialization, and the full method.
enum class Arm { kLocal, kGlobal, kFixedCombined, kLearnedCombined };

std::string arm_name(Arm arm);

/// Optimizes the arm's objective, embeds Z, runs k-means, and scores against
/// the dataset labels when present. kmeans_seed defaults to params.seed;
/// the grid sweep varies it independently.
RunReport run_arm(const MultiViewDataset& dataset, const HyperParams& params,
                  Arm arm, std::optional<std::uint64_t> kmeans_seed = std::nullopt);

struct GridSpec {
  std::vector<double> lambdas = {1e-3, 1e-2, 1e-1, 1.0};
  std::vector<double> mus = {0.0, 1e-4, 1.0, 1e4};
  std::vector<int> anchor_multipliers = {1, 2, 5};
  int repeats = 10;
};

struct GridCell {
  double lambda = 0.0;
  double mu = 0.0;
  int anchor_multiplier = 1;
  int m = 0;
  std::vector<RunReport> runs;  // one per repeat (k-means seed varies)
  bool failed = false;
  std::string error;
  double mean_acc = 0.0, std_acc = 0.0;
  double mean_nmi = 0.0, std_nmi = 0.0;
  double mean_fscore = 0.0, std_fscore = 0.0;
};

/// Full sweep; per-cell failures are recorded and the sweep continues.
std::vector<GridCell> run_grid(const MultiViewDataset& dataset,
                               const HyperParams& base, const GridSpec& grid);

struct BenchPoint {
  int n = 0;
  double seconds = 0.0;
};

struct BenchReport {
  std::vector<BenchPoint> points;
  std::optional<double> loglog_slope;  // omitted for a single size
};

/// Times fixed-iteration fits (convergence check disabled) over sample sizes
/// and least-squares fits the log-log slope of time vs. n.
BenchReport run_bench(const std::vector<int>& sizes, const SyntheticSpec& proto,
                      const HyperParams& params, int fixed_iters);

}  // namespace emvgc
