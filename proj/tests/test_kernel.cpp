#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hybridcomp/kernel.hpp"
#include "hybridcomp/rng.hpp"
#include "oracles.hpp"

using namespace hybridcomp;

TEST_CASE("scalar square on [1, 2] pins to the lower bound") {
  ConstraintSet cs = ConstraintSet::free_box(1);
  cs.lower(0) = 1.0;
  cs.upper(0) = 2.0;
  Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(1);
    g(0) = 2.0 * x(0);
    return x(0) * x(0);
  };
  const KernelResult r = convex_kernel_minimize(f, cs, Eigen::VectorXd::Constant(1, 1.7));
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sum of squares on the simplex spreads uniformly") {
  const int n = 6;
  ConstraintSet cs = ConstraintSet::free_box(n);
  cs.lower.setZero();
  cs.upper.setOnes();
  SimplexBlock blk;
  for (int i = 0; i < n; ++i) blk.indices.push_back(i);
  blk.total = 1.0;
  cs.simplex_blocks.push_back(blk);
  Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  Eigen::VectorXd start(n);
  start << 0.9, 0.1, 0.0, 0.0, 0.0, 0.0;
  const KernelResult r = convex_kernel_minimize(f, cs, start);
  CHECK(r.status == SolveStatus::Optimal);
  for (int i = 0; i < n; ++i) CHECK(r.x(i) == doctest::Approx(1.0 / n).epsilon(1e-6));
}

TEST_CASE("sum-floor block projection honors the demand") {
  const int n = 4;
  ConstraintSet cs = ConstraintSet::free_box(n);
  cs.lower.setZero();
  cs.upper.setConstant(2.0);
  SumFloorBlock blk;
  for (int i = 0; i < n; ++i) blk.indices.push_back(i);
  blk.min_total = 3.0;
  cs.sum_floor_blocks.push_back(blk);

  // cubic-style separable objective wants everything at zero
  Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 3.0 * x.array().square().matrix();
    return x.array().cube().sum();
  };
  const KernelResult r = convex_kernel_minimize(f, cs, Eigen::VectorXd::Zero(n));
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.x.sum() == doctest::Approx(3.0).epsilon(1e-9));
  for (int i = 0; i < n; ++i) CHECK(r.x(i) == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("inconsistent blocks are reported infeasible outright") {
  ConstraintSet cs = ConstraintSet::free_box(2);
  cs.lower.setConstant(0.6);
  cs.upper.setOnes();
  SimplexBlock blk;
  blk.indices = {0, 1};
  blk.total = 1.0;  // lower bounds already sum to 1.2
  cs.simplex_blocks.push_back(blk);
  Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  const KernelResult r = convex_kernel_minimize(f, cs, Eigen::VectorXd::Zero(2));
  CHECK(r.status == SolveStatus::Infeasible);
}

TEST_CASE("diagonal quadratic constraint activates cleanly") {
  // minimize (x - 2)^2 subject to x^2 <= 1
  ConstraintSet cs = ConstraintSet::free_box(1);
  DiagQuadConstraint q;
  q.quad = Eigen::VectorXd::Constant(1, 1.0);
  q.lin = Eigen::VectorXd::Zero(1);
  q.constant = -1.0;
  cs.quadratic.push_back(q);
  Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(1);
    g(0) = 2.0 * (x(0) - 2.0);
    return (x(0) - 2.0) * (x(0) - 2.0);
  };
  const KernelResult r = convex_kernel_minimize(f, cs, Eigen::VectorXd::Zero(1));
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("random small QPs match the active-set enumeration oracle") {
  SplitMix64 g(2024);
  int solved_optimal = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(g() % 4);  // 2..5
    const int m = 3 + static_cast<int>(g() % 4);  // 3..6 rows
    oracles::DenseQp qp;
    Eigen::MatrixXd G(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) G(r, c) = g.normal();
    qp.Q = G.transpose() * G + 0.5 * Eigen::MatrixXd::Identity(n, n);
    qp.c = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return g.normal(); });
    qp.A = Eigen::MatrixXd::NullaryExpr(m, n, [&](Eigen::Index, Eigen::Index) {
      return g.normal();
    });
    Eigen::VectorXd x0 =
        Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return 0.3 * g.normal(); });
    qp.b = qp.A * x0 +
           Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return g.uniform(0.1, 1.0); });

    const double reference = oracles::qp_active_set_optimum(qp);
    REQUIRE(std::isfinite(reference));

    ConstraintSet cs = ConstraintSet::free_box(n);
    for (int r = 0; r < m; ++r) {
      LinearConstraint lc;
      lc.coeff = qp.A.row(r).transpose();
      lc.rhs = qp.b(r);
      cs.linear.push_back(std::move(lc));
    }
    Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
      grad = qp.Q * x + qp.c;
      return 0.5 * x.dot(qp.Q * x) + qp.c.dot(x);
    };
    const KernelResult r = convex_kernel_minimize(f, cs, x0);
    if (r.status == SolveStatus::Optimal) ++solved_optimal;
    CHECK(std::abs(r.objective - reference) <= 1e-6 * std::max(1.0, std::abs(reference)));
  }
  CHECK(solved_optimal >= 28);  // the occasional feasible-suboptimal exit is tolerated
}

TEST_CASE("projection onto a bounded simplex matches a QP solve") {
  SplitMix64 g(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(g() % 3);
    ConstraintSet cs = ConstraintSet::free_box(n);
    cs.lower.setZero();
    for (int i = 0; i < n; ++i) cs.upper(i) = g.uniform(0.3, 1.0);
    SimplexBlock blk;
    for (int i = 0; i < n; ++i) blk.indices.push_back(i);
    blk.total = 1.0;
    cs.simplex_blocks.push_back(blk);

    Eigen::VectorXd y =
        Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return g.normal(); });
    const Eigen::VectorXd proj = cs.project(y);

    // reference: min 1/2||x - y||^2 with equality sum handled as two rows
    oracles::DenseQp qp;
    qp.Q = Eigen::MatrixXd::Identity(n, n);
    qp.c = -y;
    qp.A.resize(2 * n + 2, n);
    qp.b.resize(2 * n + 2);
    for (int i = 0; i < n; ++i) {
      qp.A.row(i) = -Eigen::RowVectorXd::Unit(n, i);
      qp.b(i) = 0.0;
      qp.A.row(n + i) = Eigen::RowVectorXd::Unit(n, i);
      qp.b(n + i) = cs.upper(i);
    }
    qp.A.row(2 * n).setOnes();
    qp.b(2 * n) = 1.0;
    qp.A.row(2 * n + 1).setConstant(-1.0);
    qp.b(2 * n + 1) = -1.0;
    Eigen::VectorXd ref;
    oracles::qp_active_set_optimum(qp, &ref);
    REQUIRE(ref.size() == n);
    CHECK((proj - ref).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}
