#include "emvgc/experiment.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace emvgc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

OptimizerState fit_fixed_combined(const MultiViewDataset& dataset,
                                  const HyperParams& params) {
  validate(dataset);
  validate(params);
  OptimizerState state;
  auto t0 = Clock::now();
  state.anchors = init_anchors(dataset, params.m, params.anchor_init, params.seed);
  state.timings["init"] = elapsed(t0, Clock::now());
  t0 = Clock::now();
  state.graph = update_graph(dataset, state.anchors, params.lambda, params.mu,
                             params.qp_tol, params.qp_max_iters, params.threads);
  state.timings["z_update"] = elapsed(t0, Clock::now());
  state.iterations = 1;
  state.objective_trace.push_back(
      objective(dataset, state.anchors, state.graph, params.lambda, params.mu));
  return state;
}

}  // namespace

std::string arm_name(Arm arm) {
  switch (arm) {
    case Arm::kLocal: return "local";
    case Arm::kGlobal: return "global";
    case Arm::kFixedCombined: return "fixed";
    case Arm::kLearnedCombined: return "learned";
  }
  return "unknown";
}

RunReport run_arm(const MultiViewDataset& dataset, const HyperParams& params,
                  Arm arm, std::optional<std::uint64_t> kmeans_seed) {
  OptimizerState state;
  switch (arm) {
    case Arm::kLocal:
      state = fit_local(dataset, params);
      break;
    case Arm::kGlobal:
      state = fit_global(dataset, params);
      break;
    case Arm::kFixedCombined:
      state = fit_fixed_combined(dataset, params);
      break;
    case Arm::kLearnedCombined:
      state = fit(dataset, params);
      break;
  }

  RunReport report;
  report.objective_trace = state.objective_trace;
  report.iterations = state.iterations;
  report.timings = state.timings;

  auto t0 = Clock::now();
  Embedding emb = embed(state.graph, params.k);
  auto t1 = Clock::now();
  KmeansResult km = kmeans(emb, params.k, params.kmeans_restarts,
                           kmeans_seed.value_or(params.seed));
  auto t2 = Clock::now();
  report.timings["svd"] = elapsed(t0, t1);
  report.timings["kmeans"] = elapsed(t1, t2);
  report.embedding = std::move(emb.H);
  report.labels = std::move(km.labels);
  if (dataset.labels) {
    report.acc = accuracy(report.labels, *dataset.labels);
    report.nmi = nmi(report.labels, *dataset.labels);
    report.fscore = fscore(report.labels, *dataset.labels);
  }
  return report;
}

std::vector<GridCell> run_grid(const MultiViewDataset& dataset,
                               const HyperParams& base, const GridSpec& grid) {
  if (grid.lambdas.empty() || grid.mus.empty() || grid.anchor_multipliers.empty() ||
      grid.repeats < 1) {
    throw Error("invalid-hyperparams", "grid lists must be nonempty, repeats >= 1");
  }
  for (double lambda : grid.lambdas) {
    if (!(lambda > 0.0 && lambda <= 1.0)) {
      throw Error("invalid-hyperparams", "grid lambda outside (0, 1]");
    }
  }
  std::vector<GridCell> cells;
  for (double lambda : grid.lambdas) {
    for (double mu : grid.mus) {
      for (int mult : grid.anchor_multipliers) {
        GridCell cell;
        cell.lambda = lambda;
        cell.mu = mu;
        cell.anchor_multiplier = mult;
        cell.m = mult * base.k;
        HyperParams params = base;
        params.lambda = lambda;
        params.mu = mu;
        params.m = cell.m;
        try {
          if (params.m > dataset.n()) {
            throw Error("invalid-hyperparams", "m exceeds sample count");
          }
          // Optimization seed fixed per cell; repeats vary the k-means seed.
          OptimizerState state = fit(dataset, params);
          Embedding emb = embed(state.graph, params.k);
          for (int r = 0; r < grid.repeats; ++r) {
            RunReport report;
            report.objective_trace = state.objective_trace;
            report.iterations = state.iterations;
            report.timings = state.timings;
            KmeansResult km =
                kmeans(emb, params.k, params.kmeans_restarts,
                       base.seed + 7919ull * static_cast<std::uint64_t>(r + 1));
            report.labels = std::move(km.labels);
            if (dataset.labels) {
              report.acc = accuracy(report.labels, *dataset.labels);
              report.nmi = nmi(report.labels, *dataset.labels);
              report.fscore = fscore(report.labels, *dataset.labels);
            }
            cell.runs.push_back(std::move(report));
          }
          auto stats = [&](auto pick, double& mean, double& sd) {
            double sum = 0.0, sum2 = 0.0;
            int count = 0;
            for (const RunReport& r : cell.runs) {
              const auto v = pick(r);
              if (v) {
                sum += *v;
                sum2 += *v * *v;
                ++count;
              }
            }
            if (count > 0) {
              mean = sum / count;
              sd = std::sqrt(std::max(0.0, sum2 / count - mean * mean));
            }
          };
          stats([](const RunReport& r) { return r.acc; }, cell.mean_acc, cell.std_acc);
          stats([](const RunReport& r) { return r.nmi; }, cell.mean_nmi, cell.std_nmi);
          stats([](const RunReport& r) { return r.fscore; }, cell.mean_fscore,
                cell.std_fscore);
        } catch (const Error& e) {
          cell.failed = true;
          cell.error = e.what();
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

BenchReport run_bench(const std::vector<int>& sizes, const SyntheticSpec& proto,
                      const HyperParams& params, int fixed_iters) {
  BenchReport report;
  for (int n : sizes) {
    SyntheticSpec spec = proto;
    spec.n = n;
    MultiViewDataset dataset = generate_synthetic(spec);
    HyperParams p = params;
    p.max_outer_iters = fixed_iters;
    // Best of three timed fits; a single sample is at the mercy of
    // scheduler and cache noise on the larger sizes.
    double secs = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
      auto t0 = Clock::now();
      OptimizerState state = fit(dataset, p, /*check_convergence=*/false);
      secs = std::min(secs, elapsed(t0, Clock::now()));
      (void)state;
    }
    report.points.push_back({n, secs});
  }
  if (report.points.size() >= 2) {
    // Least-squares slope of log(time) against log(n).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int count = static_cast<int>(report.points.size());
    for (const BenchPoint& pt : report.points) {
      const double x = std::log(static_cast<double>(pt.n));
      const double y = std::log(std::max(pt.seconds, 1e-9));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    report.loglog_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  }
  return report;
}

}  // namespace emvgc
