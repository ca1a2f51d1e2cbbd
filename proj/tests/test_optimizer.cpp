#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "emvgc/data.hpp"
#include "emvgc/metrics.hpp"
#include "emvgc/optimizer.hpp"
#include "emvgc/spectral.hpp"
#include "oracles.hpp"

using namespace emvgc;

namespace {

struct Instance {
  MultiViewDataset dataset;
  AnchorSet anchors;
  AnchorGraph graph;
};

Instance random_instance(int v, int d, int n, int m, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Instance inst;
  for (int p = 0; p < v; ++p) {
    Matrix X(d, n), A(d, m);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < n; ++j) X(i, j) = gauss(rng);
      for (int j = 0; j < m; ++j) A(i, j) = gauss(rng);
    }
    inst.dataset.views.push_back(std::move(X));
    inst.anchors.anchors.push_back(std::move(A));
  }
  inst.graph.Z = Matrix(m, n);
  for (int i = 0; i < n; ++i) {
    Vector col(m);
    for (int j = 0; j < m; ++j) col[j] = gauss(rng);
    inst.graph.Z.col(i) = project_simplex(col);
  }
  return inst;
}

}  // namespace

TEST_CASE("objective: zero anchors leave only the ridge term") {
  std::mt19937_64 rng(1);
  Instance inst = random_instance(2, 3, 6, 3, rng);
  for (Matrix& A : inst.anchors.anchors) A.setZero();
  const double mu = 0.7;
  const double obj = objective(inst.dataset, inst.anchors, inst.graph, 0.5, mu);
  CHECK(obj == doctest::Approx(mu * inst.graph.Z.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("objective: self-representation identity") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  const int d = 3, n = 5;
  Matrix X(d, n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n; ++j) X(i, j) = gauss(rng);
  MultiViewDataset ds;
  ds.views.push_back(X);
  AnchorSet anchors;
  anchors.anchors.push_back(X);
  AnchorGraph graph{Matrix::Identity(n, n)};
  // lambda enters through a vanishing-weight limit; at lambda -> 0 the value
  // is tr(X^T X) - 2 tr(X^T X) = -tr(X^T X).
  const double obj = objective(ds, anchors, graph, 1e-300, 0.0);
  CHECK(obj == doctest::Approx(-X.squaredNorm()).epsilon(1e-9));
}

TEST_CASE("objective matches the naive triple-loop oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(2, 3, 6, 3, rng);
    const double lambda = 0.3, mu = 0.2;
    const double got =
        objective(inst.dataset, inst.anchors, inst.graph, lambda, mu);
    const double want = oracles::objective_loops(
        inst.dataset.views, inst.anchors.anchors, inst.graph.Z, lambda, mu);
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("objective rejects shape mismatches") {
  std::mt19937_64 rng(4);
  Instance inst = random_instance(2, 3, 6, 3, rng);
  AnchorGraph bad{Matrix::Constant(4, 6, 0.25)};
  CHECK_THROWS_AS(objective(inst.dataset, inst.anchors, bad, 0.5, 0.0), Error);
}

TEST_CASE("local affinity identity tr(M Z) = tr(A diag(Z1) A^T)") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = random_instance(2, 4, 8, 5, rng);
    const LocalAffinity aff = local_affinity(inst.anchors);
    for (std::size_t p = 0; p < inst.anchors.anchors.size(); ++p) {
      const Matrix& A = inst.anchors.anchors[p];
      double lhs = 0.0;
      for (int i = 0; i < inst.graph.Z.cols(); ++i) {
        lhs += aff.q[p].dot(inst.graph.Z.col(i));
      }
      const Vector row_mass = inst.graph.Z.rowwise().sum();
      const double rhs = (A * row_mass.asDiagonal() * A.transpose()).trace();
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("update_anchors: Z = I closed forms") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss;
  const int d = 3, n = 4;
  Matrix X(d, n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n; ++j) X(i, j) = gauss(rng);
  MultiViewDataset ds;
  ds.views.push_back(X);
  AnchorGraph graph{Matrix::Identity(n, n)};

  AnchorSet near_limit = update_anchors(ds, graph, 1e-12);
  CHECK((near_limit.anchors[0] - X).norm() <= 1e-9 * (1.0 + X.norm()));

  AnchorSet halved = update_anchors(ds, graph, 1.0);
  CHECK((halved.anchors[0] - X / 2.0).norm() <= 1e-9 * (1.0 + X.norm()));
}

TEST_CASE("update_anchors: gradient vanishes and perturbations cost more") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = random_instance(2, 3, 10, 4, rng);
    const double lambda = 0.4;
    AnchorSet updated = update_anchors(inst.dataset, inst.graph, lambda);

    const Matrix& Z = inst.graph.Z;
    Matrix G = Z * Z.transpose();
    G.diagonal() += lambda * Z.rowwise().sum();
    for (std::size_t p = 0; p < inst.dataset.views.size(); ++p) {
      const Matrix& X = inst.dataset.views[p];
      const Matrix XZt = X * Z.transpose();
      const Matrix grad = 2.0 * updated.anchors[p] * G - 2.0 * XZt;
      CHECK(grad.norm() <= 1e-6 * (1.0 + XZt.norm()));
    }

    const double base =
        objective(inst.dataset, updated, inst.graph, lambda, 0.0);
    for (int probe = 0; probe < 100; ++probe) {
      AnchorSet perturbed = updated;
      for (Matrix& A : perturbed.anchors) {
        Matrix delta(A.rows(), A.cols());
        for (int i = 0; i < A.rows(); ++i)
          for (int j = 0; j < A.cols(); ++j) delta(i, j) = gauss(rng);
        A += 1e-3 * delta / delta.norm();
      }
      CHECK(objective(inst.dataset, perturbed, inst.graph, lambda, 0.0) >=
            base - 1e-12 * (1.0 + std::abs(base)));
    }
  }
}

TEST_CASE("update_anchors gradient matches central finite differences") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = random_instance(1, 3, 8, 4, rng);
    const double lambda = 0.6;
    AnchorSet updated = update_anchors(inst.dataset, inst.graph, lambda);
    const Matrix& Z = inst.graph.Z;
    Matrix G = Z * Z.transpose();
    G.diagonal() += lambda * Z.rowwise().sum();
    const Matrix analytic =
        2.0 * updated.anchors[0] * G - 2.0 * inst.dataset.views[0] * Z.transpose();
    const double h = 1e-5;
    for (int i = 0; i < updated.anchors[0].rows(); ++i) {
      for (int j = 0; j < updated.anchors[0].cols(); ++j) {
        AnchorSet plus = updated, minus = updated;
        plus.anchors[0](i, j) += h;
        minus.anchors[0](i, j) -= h;
        const double fd = (objective(inst.dataset, plus, inst.graph, lambda, 0.0) -
                           objective(inst.dataset, minus, inst.graph, lambda, 0.0)) /
                          (2.0 * h);
        CHECK(analytic(i, j) ==
              doctest::Approx(fd).epsilon(1e-4).scale(1.0 + std::abs(fd)));
      }
    }
  }
}

TEST_CASE("update_graph: samples on anchors produce one-hot columns") {
  const int d = 2, m = 3;
  Matrix A(d, m);
  A << 0.0, 5.0, -4.0, 0.0, 1.0, 3.0;
  MultiViewDataset ds;
  Matrix X(d, 6);
  std::vector<int> owner = {0, 1, 2, 0, 1, 2};
  for (int i = 0; i < 6; ++i) X.col(i) = A.col(owner[i]);
  ds.views.push_back(X);
  AnchorSet anchors;
  anchors.anchors.push_back(A);
  // Tiny lambda: the QP needs strict convexity direction from A^T A alone.
  AnchorGraph g = update_graph(ds, anchors, 1e-12, 0.0, 1e-10, 20000);
  for (int i = 0; i < 6; ++i) {
    CHECK(g.Z(owner[i], i) == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("update_graph: identical samples get identical columns") {
  std::mt19937_64 rng(9);
  Instance inst = random_instance(2, 3, 6, 4, rng);
  inst.dataset.views[0].col(3) = inst.dataset.views[0].col(1);
  inst.dataset.views[1].col(3) = inst.dataset.views[1].col(1);
  AnchorGraph g = update_graph(inst.dataset, inst.anchors, 0.5, 0.1, 1e-9);
  CHECK((g.Z.col(1) - g.Z.col(3)).norm() == 0.0);
}

TEST_CASE("update_graph matches the per-column enumeration oracle") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = random_instance(2, 3, 8, 5, rng);
    const double lambda = 0.3, mu = 0.2;
    AnchorGraph g =
        update_graph(inst.dataset, inst.anchors, lambda, mu, 1e-10, 20000);
    validate(g);

    const int m = 5;
    Matrix Q = mu * Matrix::Identity(m, m);
    Matrix F = Matrix::Zero(m, 8);
    for (std::size_t p = 0; p < inst.dataset.views.size(); ++p) {
      const Matrix& A = inst.anchors.anchors[p];
      Q += A.transpose() * A;
      F -= A.transpose() * inst.dataset.views[p];
      F.colwise() += 0.5 * lambda *
                     Vector(A.colwise().squaredNorm().transpose());
    }
    for (int i = 0; i < 8; ++i) {
      const double got = 0.5 * g.Z.col(i).dot(Q * g.Z.col(i)) + F.col(i).dot(g.Z.col(i));
      const double want = oracles::simplex_qp_enum_objective(Q, F.col(i));
      CHECK(std::abs(got - want) <= 1e-6 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("fit: degenerate repeated-point dataset is solved exactly") {
  // Linearly independent prototypes keep A^T A positive definite, so the
  // mu = 0 graph subproblem stays strongly convex on the simplex.
  const int d = 3, m = 3, n = 12;
  Matrix proto(d, m);
  proto << 0.0, 10.0, 0.0,
           0.0, 0.0, -10.0,
           12.0, 0.0, 5.0;
  MultiViewDataset ds;
  Matrix X(d, n);
  std::vector<int> truth(n);
  for (int i = 0; i < n; ++i) {
    truth[i] = i % m;
    X.col(i) = proto.col(truth[i]);
  }
  ds.views.push_back(X);
  ds.labels = truth;

  HyperParams params;
  // Vanishing lambda: any visible local-term weight shifts the optimum off
  // the exact self-representation this test pins down.
  params.lambda = 1e-8;
  params.mu = 0.0;
  params.m = m;
  params.k = m;
  params.seed = 1;
  params.anchor_init = AnchorInit::kKmeans;
  params.qp_max_iters = 20000;
  OptimizerState state = fit(ds, params);
  validate(state.graph);

  // Converged objective equals the value at the recovered one-hot Z.
  double x_energy = X.squaredNorm();
  const double lhs = state.objective_trace.back() + x_energy;
  const LocalAffinity aff = local_affinity(state.anchors);
  double local_term = 0.0;
  for (int i = 0; i < n; ++i) local_term += aff.q[0].dot(state.graph.Z.col(i));
  const double expect = -x_energy + params.lambda * local_term;
  CHECK(state.objective_trace.back() ==
        doctest::Approx(expect).epsilon(1e-6));
  (void)lhs;

  Embedding H = embed(state.graph, m);
  KmeansResult km = kmeans(H, m, 10, 7);
  CHECK(accuracy(km.labels, truth) == doctest::Approx(1.0));
}

TEST_CASE("fit: max_outer_iters=1 runs exactly one iteration") {
  std::mt19937_64 rng(11);
  Instance inst = random_instance(2, 3, 20, 4, rng);
  HyperParams params;
  params.m = 4;
  params.k = 2;
  params.max_outer_iters = 1;
  OptimizerState state = fit(inst.dataset, params);
  CHECK(state.iterations == 1);
  CHECK(state.objective_trace.size() == 2);
}

TEST_CASE("fit: synthetic 5-Gaussian pipeline reaches high accuracy") {
  SyntheticSpec spec;
  spec.seed = 2024;
  MultiViewDataset ds = generate_synthetic(spec);
  HyperParams params;
  params.lambda = 0.01;
  params.mu = 1.0;
  params.m = spec.k;
  params.k = spec.k;
  params.seed = 3;
  params.anchor_init = AnchorInit::kKmeans;
  OptimizerState state = fit(ds, params);
  for (std::size_t t = 1; t < state.objective_trace.size(); ++t) {
    CHECK(state.objective_trace[t] <=
          state.objective_trace[t - 1] +
              1e-9 * (1.0 + std::abs(state.objective_trace[t - 1])));
  }
  Embedding H = embed(state.graph, params.k);
  KmeansResult km = kmeans(H, params.k, 10, 5);
  CHECK(accuracy(km.labels, *ds.labels) >= 0.95);
}

TEST_CASE("fit is deterministic under identical seeds") {
  SyntheticSpec spec;
  spec.n = 100;
  spec.seed = 9;
  MultiViewDataset ds = generate_synthetic(spec);
  HyperParams params;
  params.m = 10;
  params.k = 5;
  params.seed = 21;
  params.max_outer_iters = 5;
  OptimizerState a = fit(ds, params);
  OptimizerState b = fit(ds, params);
  REQUIRE(a.objective_trace.size() == b.objective_trace.size());
  for (std::size_t t = 0; t < a.objective_trace.size(); ++t) {
    CHECK(a.objective_trace[t] == b.objective_trace[t]);
  }
  CHECK((a.graph.Z - b.graph.Z).norm() == 0.0);
}

TEST_CASE("monotone descent and lower bound over random instances") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int v = 1 + static_cast<int>(rng() % 3);
    const int n = 20 + static_cast<int>(rng() % 60);
    const int m = 3 + static_cast<int>(rng() % 8);
    Instance inst = random_instance(v, 4, n, m, rng);
    HyperParams params;
    params.lambda = std::pow(10.0, -static_cast<double>(rng() % 4));
    params.mu = (rng() % 2) ? 0.0 : 0.5;
    params.m = m;
    params.k = std::min(3, m);
    params.max_outer_iters = 8;
    params.seed = trial;
    OptimizerState state = fit(inst.dataset, params);
    double x_energy = 0.0;
    for (const Matrix& X : inst.dataset.views) x_energy += X.squaredNorm();
    for (std::size_t t = 0; t < state.objective_trace.size(); ++t) {
      if (t > 0) {
        CHECK(state.objective_trace[t] <=
              state.objective_trace[t - 1] +
                  1e-9 * (1.0 + std::abs(state.objective_trace[t - 1])));
      }
      CHECK(state.objective_trace[t] + x_energy >= -1e-9 * x_energy);
    }
  }
}

TEST_CASE("check_proposition1 inequality on random instances") {
  std::mt19937_64 rng(15);
  const double lambdas[] = {1e-3, 1e-2, 1e-1, 1.0};
  for (int trial = 0; trial < 500; ++trial) {
    Instance inst = random_instance(2, 3, 6, 4, rng);
    const double lambda = lambdas[rng() % 4];
    const double mu1 = (rng() % 3) * 0.5;
    Proposition1Check chk = check_proposition1(inst.dataset, inst.anchors,
                                               inst.graph, lambda, lambda * mu1);
    CHECK(chk.lhs >= chk.rhs - 1e-9 * (1.0 + std::abs(chk.lhs)));
    // rhs agrees with the elementwise local objective oracle.
    const double local = oracles::local_objective_loops(
        inst.dataset.views, inst.anchors.anchors, inst.graph.Z, mu1);
    CHECK(chk.rhs == doctest::Approx(lambda * local).epsilon(1e-9));
  }
}

TEST_CASE("check_proposition1: slack equals the two dropped terms exactly") {
  // The bound discards (1 - lambda) sum_p ||X - A Z||^2 and
  // lambda sum_p ||A Z||^2; the gap must reproduce them to rounding.
  std::mt19937_64 rng(16);
  const double lambdas[] = {1e-2, 0.5, 1.0};
  for (int trial = 0; trial < 100; ++trial) {
    Instance inst = random_instance(2, 3, 6, 4, rng);
    if (trial % 2 == 0) {
      // One-hot columns exercise the vertex case from the convergence proof.
      inst.graph.Z.setZero();
      for (int i = 0; i < 6; ++i) inst.graph.Z(rng() % 4, i) = 1.0;
    }
    const double lambda = lambdas[rng() % 3];
    Proposition1Check chk =
        check_proposition1(inst.dataset, inst.anchors, inst.graph, lambda, 0.5);
    double dropped = 0.0;
    for (std::size_t p = 0; p < inst.dataset.views.size(); ++p) {
      const Matrix AZ = inst.anchors.anchors[p] * inst.graph.Z;
      dropped += (1.0 - lambda) * (inst.dataset.views[p] - AZ).squaredNorm();
      dropped += lambda * AZ.squaredNorm();
    }
    CHECK(chk.lhs - chk.rhs ==
          doctest::Approx(dropped).epsilon(1e-9).scale(1.0 + std::abs(chk.lhs)));
  }
}

TEST_CASE("check_proposition1: zero anchors reduce to lambda <= 1") {
  std::mt19937_64 rng(17);
  Instance inst = random_instance(2, 3, 6, 4, rng);
  for (Matrix& A : inst.anchors.anchors) A.setZero();
  double x_energy = 0.0;
  for (const Matrix& X : inst.dataset.views) x_energy += X.squaredNorm();
  const double lambda = 0.25, mu = 0.5;
  Proposition1Check chk =
      check_proposition1(inst.dataset, inst.anchors, inst.graph, lambda, mu);
  CHECK(chk.lhs ==
        doctest::Approx(x_energy + mu * inst.graph.Z.squaredNorm()).epsilon(1e-10));
  CHECK(chk.lhs >= chk.rhs - 1e-9 * (1.0 + std::abs(chk.lhs)));
}
