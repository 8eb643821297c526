#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hybridcomp {

enum class SolveStatus { Optimal, FeasibleSuboptimal, Infeasible };

const char* solve_status_name(SolveStatus s);

/// Smooth convex objective: returns f(x) and fills grad (same size as x).
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// sum over block indices fixed to `total`, entries kept inside the global box.
struct SimplexBlock {
  std::vector<int> indices;
  double total = 1.0;
};

/// sum over block indices at least `min_total`, entries kept inside the box.
struct SumFloorBlock {
  std::vector<int> indices;
  double min_total = 0.0;
};

/// coeff . x <= rhs. Callers pre-scale so residuals are O(1)-normalized.
struct LinearConstraint {
  Eigen::VectorXd coeff;
  double rhs = 0.0;
};

/// sum_i quad_i x_i^2 + lin . x + constant <= 0 with quad >= 0 (convex).
struct DiagQuadConstraint {
  Eigen::VectorXd quad;
  Eigen::VectorXd lin;
  double constant = 0.0;

  double eval(const Eigen::VectorXd& x) const {
    return (quad.array() * x.array().square()).sum() + lin.dot(x) + constant;
  }
  void add_gradient(const Eigen::VectorXd& x, double w, Eigen::VectorXd& g) const {
    g.noalias() += w * (2.0 * quad.array() * x.array()).matrix();
    g.noalias() += w * lin;
  }
};

/// Feasible set descriptor: a box plus disjoint simplex / sum-floor index
/// blocks (handled by exact projection) and general linear / diagonal-
/// quadratic inequalities (handled by augmented-Lagrangian multipliers).
struct ConstraintSet {
  Eigen::VectorXd lower;  // elementwise, -inf allowed
  Eigen::VectorXd upper;  // elementwise, +inf allowed
  std::vector<SimplexBlock> simplex_blocks;
  std::vector<SumFloorBlock> sum_floor_blocks;
  std::vector<LinearConstraint> linear;
  std::vector<DiagQuadConstraint> quadratic;

  static ConstraintSet free_box(int n);

  /// Euclidean projection onto box + blocks (the exactly-handled part).
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  /// Worst violation of the general (multiplier-handled) constraints.
  double general_violation(const Eigen::VectorXd& x) const;
  /// True when the box/block part admits a point at all.
  bool blocks_consistent() const;
};

struct KernelOptions {
  double feas_tol = 1e-8;
  double opt_tol = 1e-6;
  int max_outer = 60;
  int max_inner = 20000;
  double rho_init = 100.0;
  double rho_growth = 3.0;
  double rho_max = 1e7;
};

struct KernelResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  SolveStatus status = SolveStatus::FeasibleSuboptimal;
  int iterations = 0;         // accumulated inner (projected-gradient) steps
  double kkt_residual = 0.0;  // gradient-mapping norm at the returned point
  double max_violation = 0.0; // worst general-constraint residual
};

/// Minimizes a smooth convex objective over the descriptor set via an
/// augmented Lagrangian with spectral-projected-gradient inner solves.
/// Exact projections take care of box/simplex/sum-floor structure;
/// multipliers take care of the declared linear and quadratic inequalities.
KernelResult convex_kernel_minimize(const Objective& objective,
                                    const ConstraintSet& constraints,
                                    const Eigen::VectorXd& start,
                                    const KernelOptions& options = {});

}  // namespace hybridcomp
