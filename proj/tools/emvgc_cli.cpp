// Experiment harness: single runs, grid sweeps, ablations, synthetic data
// generation with plot exports, and a scaling benchmark.

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "emvgc/experiment.hpp"

using namespace emvgc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string manifest;
  bool synth = false;
  SyntheticSpec synth_spec;
  HyperParams params;
  std::string normalize = "none";
  std::string anchor_init = "sample";
  std::string out;
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts, bool dataset_flags = true) {
  if (dataset_flags) {
    cmd->add_option("--manifest", opts.manifest, "Dataset manifest file");
    cmd->add_flag("--synth", opts.synth, "Use the built-in synthetic dataset");
    cmd->add_option("--synth-n", opts.synth_spec.n, "Synthetic sample count");
    cmd->add_option("--synth-sigma", opts.synth_spec.sigma,
                    "Synthetic within-cluster std");
    cmd->add_option("--synth-radius", opts.synth_spec.radius,
                    "Synthetic mean-placement radius");
    cmd->add_option("--synth-views", opts.synth_spec.views, "Synthetic view count");
    cmd->add_option("--synth-dim", opts.synth_spec.dim,
                    "Synthetic per-view dimensionality");
  }
  cmd->add_option("--lambda", opts.params.lambda, "Local/global tradeoff in (0,1]");
  cmd->add_option("--mu", opts.params.mu, "Ridge regularizer >= 0");
  cmd->add_option("--anchors", opts.params.m, "Anchor count m");
  cmd->add_option("--clusters", opts.params.k, "Cluster count k");
  cmd->add_option("--seed", opts.params.seed, "Random seed");
  cmd->add_option("--max-iters", opts.params.max_outer_iters, "Outer iteration cap");
  cmd->add_option("--tol", opts.params.rel_tol, "Relative objective tolerance");
  cmd->add_option("--qp-tol", opts.params.qp_tol, "Per-column QP KKT tolerance");
  cmd->add_option("--anchor-init", opts.anchor_init, "Anchor init: sample | kmeans")
      ->check(CLI::IsMember({"sample", "kmeans"}));
  cmd->add_option("--restarts", opts.params.kmeans_restarts, "k-means restarts");
  cmd->add_option("--normalize", opts.normalize, "none | zscore | unit")
      ->check(CLI::IsMember({"none", "zscore", "unit"}));
  cmd->add_option("--threads", opts.params.threads, "Worker threads (1 = bitwise reproducible)");
  cmd->add_option("--out", opts.out, "Output file or directory");
}

MultiViewDataset load_dataset(const CommonOpts& opts) {
  if (opts.synth) {
    SyntheticSpec spec = opts.synth_spec;
    spec.k = opts.params.k;
    spec.seed = opts.params.seed;
    return generate_synthetic(spec);
  }
  if (opts.manifest.empty()) {
    throw Error("missing-file", "pass --manifest FILE or --synth");
  }
  DatasetManifest manifest = load_manifest(opts.manifest);
  if (opts.normalize == "zscore") manifest.normalize = Normalize::kZscore;
  if (opts.normalize == "unit") manifest.normalize = Normalize::kUnitNorm;
  return load(manifest);
}

HyperParams resolve_params(const CommonOpts& opts) {
  HyperParams params = opts.params;
  params.anchor_init =
      opts.anchor_init == "kmeans" ? AnchorInit::kKmeans : AnchorInit::kSample;
  validate(params);
  return params;
}

json params_json(const HyperParams& p) {
  return json{{"lambda", p.lambda},
              {"mu", p.mu},
              {"anchors", p.m},
              {"clusters", p.k},
              {"max_iters", p.max_outer_iters},
              {"tol", p.rel_tol},
              {"qp_tol", p.qp_tol},
              {"seed", p.seed},
              {"anchor_init", p.anchor_init == AnchorInit::kKmeans ? "kmeans" : "sample"},
              {"restarts", p.kmeans_restarts},
              {"threads", p.threads}};
}

json report_json(const RunReport& report) {
  json j{{"iterations", report.iterations},
         {"objective_trace", report.objective_trace},
         {"timings", report.timings},
         {"labels", report.labels}};
  if (report.acc) {
    j["metrics"] = {{"acc", *report.acc}, {"nmi", *report.nmi},
                    {"fscore", *report.fscore}};
  }
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("io-error", "cannot write " + path);
  out << j.dump(2) << '\n';
}

void print_metrics_line(const std::string& name, const RunReport& report) {
  if (report.acc) {
    std::printf("%-8s ACC %.4f  NMI %.4f  F %.4f  iters %d\n", name.c_str(),
                *report.acc, *report.nmi, *report.fscore, report.iterations);
  } else {
    std::printf("%-8s (no labels)  iters %d\n", name.c_str(), report.iterations);
  }
}

int cmd_run(const CommonOpts& opts) {
  MultiViewDataset ds = load_dataset(opts);
  HyperParams params = resolve_params(opts);
  RunReport report = run_arm(ds, params, Arm::kLearnedCombined);
  print_metrics_line("emvgc-lg", report);
  std::printf("objective: %.6f -> %.6f in %d iterations\n",
              report.objective_trace.front(), report.objective_trace.back(),
              report.iterations);
  if (!opts.out.empty()) {
    json j = report_json(report);
    j["config"] = params_json(params);
    write_json(opts.out, j);
  }
  return 0;
}

int cmd_grid(const CommonOpts& opts, const GridSpec& grid) {
  MultiViewDataset ds = load_dataset(opts);
  HyperParams base = resolve_params(opts);
  std::vector<GridCell> cells = run_grid(ds, base, grid);

  const GridCell* best = nullptr;
  std::printf("%8s %10s %4s | %-16s %-16s %-16s\n", "lambda", "mu", "m",
              "ACC mean+/-std", "NMI mean+/-std", "F mean+/-std");
  for (const GridCell& cell : cells) {
    if (cell.failed) {
      std::printf("%8g %10g %4d | FAILED: %s\n", cell.lambda, cell.mu, cell.m,
                  cell.error.c_str());
      continue;
    }
    std::printf("%8g %10g %4d | %.4f+/-%.4f  %.4f+/-%.4f  %.4f+/-%.4f\n",
                cell.lambda, cell.mu, cell.m, cell.mean_acc, cell.std_acc,
                cell.mean_nmi, cell.std_nmi, cell.mean_fscore, cell.std_fscore);
    if (!best || cell.mean_acc > best->mean_acc) best = &cell;
  }
  if (best) {
    std::printf("best cell by mean ACC: lambda=%g mu=%g m=%d (ACC %.4f)\n",
                best->lambda, best->mu, best->m, best->mean_acc);
  }
  if (!opts.out.empty()) {
    json cells_json = json::array();
    for (const GridCell& cell : cells) {
      json c{{"lambda", cell.lambda}, {"mu", cell.mu},
             {"anchor_multiplier", cell.anchor_multiplier}, {"m", cell.m},
             {"failed", cell.failed}};
      if (cell.failed) {
        c["error"] = cell.error;
      } else {
        c["mean"] = {{"acc", cell.mean_acc}, {"nmi", cell.mean_nmi},
                     {"fscore", cell.mean_fscore}};
        c["std"] = {{"acc", cell.std_acc}, {"nmi", cell.std_nmi},
                    {"fscore", cell.std_fscore}};
        json runs = json::array();
        for (const RunReport& r : cell.runs) runs.push_back(report_json(r));
        c["runs"] = runs;
      }
      cells_json.push_back(std::move(c));
    }
    json j{{"config", params_json(base)},
           {"grid", {{"lambdas", grid.lambdas}, {"mus", grid.mus},
                     {"anchor_multipliers", grid.anchor_multipliers},
                     {"repeats", grid.repeats}}},
           {"cells", cells_json}};
    write_json(opts.out, j);
  }
  return 0;
}

json ablate_arms(const MultiViewDataset& ds, const HyperParams& params) {
  // All arms share the seed; baseline and fixed arms hold their k-means-
  // initialized anchors, the learned arm starts from the same anchors.
  HyperParams arm_params = params;
  arm_params.anchor_init = AnchorInit::kKmeans;
  json arms = json::object();
  for (Arm arm : {Arm::kLocal, Arm::kGlobal, Arm::kFixedCombined,
                  Arm::kLearnedCombined}) {
    try {
      RunReport report = run_arm(ds, arm_params, arm);
      print_metrics_line(arm_name(arm), report);
      arms[arm_name(arm)] = report_json(report);
    } catch (const Error& e) {
      std::printf("%-8s ERROR: %s\n", arm_name(arm).c_str(), e.what());
      arms[arm_name(arm)] = json{{"error", e.what()}};
    }
  }
  return arms;
}

int cmd_ablate(const CommonOpts& opts) {
  MultiViewDataset ds = load_dataset(opts);
  HyperParams params = resolve_params(opts);
  json arms = ablate_arms(ds, params);
  if (!opts.out.empty()) {
    write_json(opts.out, json{{"config", params_json(params)}, {"arms", arms}});
  }
  return 0;
}

int cmd_bench(const CommonOpts& opts, std::vector<int> sizes, int fixed_iters) {
  if (sizes.empty()) sizes = {1000, 2000, 4000, 8000};
  HyperParams params = resolve_params(opts);
  SyntheticSpec proto = opts.synth_spec;
  proto.k = params.k;
  proto.seed = params.seed;
  BenchReport bench = run_bench(sizes, proto, params, fixed_iters);
  json points = json::array();
  for (const BenchPoint& pt : bench.points) {
    std::printf("n=%-7d fit time %.3fs\n", pt.n, pt.seconds);
    points.push_back({{"n", pt.n}, {"seconds", pt.seconds}});
  }
  json j{{"config", params_json(params)}, {"fixed_iters", fixed_iters},
         {"points", points}};
  if (bench.loglog_slope) {
    std::printf("log-log slope: %.3f\n", *bench.loglog_slope);
    j["loglog_slope"] = *bench.loglog_slope;
  }
  if (!opts.out.empty()) write_json(opts.out, j);
  return 0;
}

// Edge list from the recovered similarity Z^T Z, keeping weights above the
// given quantile of the nonzero entries.
json edge_list(const AnchorGraph& graph, double quantile) {
  const Matrix sim = graph.Z.transpose() * graph.Z;
  std::vector<double> weights;
  for (int i = 0; i < sim.rows(); ++i) {
    for (int j = i + 1; j < sim.cols(); ++j) {
      if (sim(i, j) > 0.0) weights.push_back(sim(i, j));
    }
  }
  double threshold = 0.0;
  if (!weights.empty()) {
    std::sort(weights.begin(), weights.end());
    const std::size_t idx = std::min(
        weights.size() - 1,
        static_cast<std::size_t>(quantile * static_cast<double>(weights.size())));
    threshold = weights[idx];
  }
  json edges = json::array();
  for (int i = 0; i < sim.rows(); ++i) {
    for (int j = i + 1; j < sim.cols(); ++j) {
      if (sim(i, j) >= threshold && sim(i, j) > 0.0) {
        edges.push_back({i, j, sim(i, j)});
      }
    }
  }
  return edges;
}

int cmd_synth(const CommonOpts& opts, double edge_quantile) {
  if (opts.out.empty()) throw Error("io-error", "--out DIR is required");
  fs::create_directories(opts.out);
  const fs::path dir(opts.out);

  SyntheticSpec spec = opts.synth_spec;
  spec.k = opts.params.k;
  spec.seed = opts.params.seed;
  MultiViewDataset ds = generate_synthetic(spec);
  for (std::size_t p = 0; p < ds.views.size(); ++p) {
    save_csv(dir / ("view" + std::to_string(p + 1) + ".csv"),
             ds.views[p].transpose());
  }
  save_labels(dir / "labels.csv", *ds.labels);
  {
    std::ofstream manifest(dir / "data.manifest");
    manifest << "name = " << (spec.views > 0 ? "synthetic" : "synthetic") << "\n";
    for (std::size_t p = 0; p < ds.views.size(); ++p) {
      manifest << "view = view" << (p + 1) << ".csv\n";
    }
    manifest << "labels = labels.csv\n";
  }

  HyperParams params = resolve_params(opts);
  params.anchor_init = AnchorInit::kKmeans;
  json summary{{"config", params_json(params)}, {"edge_quantile", edge_quantile}};
  for (Arm arm : {Arm::kLocal, Arm::kGlobal, Arm::kFixedCombined,
                  Arm::kLearnedCombined}) {
    OptimizerState state;
    switch (arm) {
      case Arm::kLocal: state = fit_local(ds, params); break;
      case Arm::kGlobal: state = fit_global(ds, params); break;
      case Arm::kFixedCombined: {
        state.anchors = init_anchors(ds, params.m, params.anchor_init, params.seed);
        state.graph = update_graph(ds, state.anchors, params.lambda, params.mu,
                                   params.qp_tol, params.qp_max_iters,
                                   params.threads);
        break;
      }
      case Arm::kLearnedCombined: state = fit(ds, params); break;
    }
    Embedding emb = embed(state.graph, params.k);
    KmeansResult km = kmeans(emb, params.k, params.kmeans_restarts, params.seed);
    const std::string name = arm_name(arm);
    json report{{"labels", km.labels},
                {"metrics", {{"acc", accuracy(km.labels, *ds.labels)},
                             {"nmi", nmi(km.labels, *ds.labels)},
                             {"fscore", fscore(km.labels, *ds.labels)}}}};
    write_json((dir / (name + "_report.json")).string(), report);
    write_json((dir / (name + "_edges.json")).string(),
               json{{"edges", edge_list(state.graph, edge_quantile)}});
    print_metrics_line(name, [&] {
      RunReport r;
      r.labels = km.labels;
      r.acc = accuracy(km.labels, *ds.labels);
      r.nmi = nmi(km.labels, *ds.labels);
      r.fscore = fscore(km.labels, *ds.labels);
      r.iterations = state.iterations;
      return r;
    }());
    summary["arms"].push_back(name);
  }
  write_json((dir / "summary.json").string(), summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EMVGC-LG: anchor-based multi-view graph clustering"};
  app.require_subcommand(1);

  CommonOpts run_opts, grid_opts, ablate_opts, bench_opts, synth_opts;
  GridSpec grid_spec;
  std::vector<int> bench_sizes;
  int bench_iters = 3;
  double edge_quantile = 0.9;

  CLI::App* run = app.add_subcommand("run", "Single EMVGC-LG run");
  add_common_flags(run, run_opts);

  CLI::App* grid = app.add_subcommand("grid", "Hyperparameter grid sweep");
  add_common_flags(grid, grid_opts);
  grid->add_option("--lambdas", grid_spec.lambdas, "Grid lambda values");
  grid->add_option("--mus", grid_spec.mus, "Grid mu values");
  grid->add_option("--anchor-multipliers", grid_spec.anchor_multipliers,
                   "Anchor counts as multiples of k");
  grid->add_option("--repeats", grid_spec.repeats, "Repeats per cell");

  CLI::App* ablate = app.add_subcommand("ablate", "Four-arm ablation");
  add_common_flags(ablate, ablate_opts);

  CLI::App* bench = app.add_subcommand("bench", "Scaling benchmark");
  add_common_flags(bench, bench_opts);
  bench->add_option("--sizes", bench_sizes, "Sample sizes to time");
  bench->add_option("--fixed-iters", bench_iters, "Outer iterations per size");

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate synthetic data, run all arms, export plot data");
  add_common_flags(synth, synth_opts);
  synth->add_option("--edge-quantile", edge_quantile,
                    "Quantile threshold for exported similarity edges");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (grid->parsed()) return cmd_grid(grid_opts, grid_spec);
    if (ablate->parsed()) return cmd_ablate(ablate_opts);
    if (bench->parsed()) return cmd_bench(bench_opts, bench_sizes, bench_iters);
    if (synth->parsed()) return cmd_synth(synth_opts, edge_quantile);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
