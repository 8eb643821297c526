#include "hybridcomp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace hybridcomp {

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleSuboptimal: return "feasible-suboptimal";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

/// Solves sum_i clip(y_i + tau, lo_i, hi_i) = total for tau by bisection.
/// The left side is continuous and non-decreasing in tau.
void project_fixed_sum(Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const std::vector<int>& idx, const Eigen::VectorXd& lo,
                       const Eigen::VectorXd& hi, double total) {
  double tau_lo = kInf, tau_hi = -kInf;
  for (int i : idx) {
    tau_lo = std::min(tau_lo, lo(i) - y(i));
    tau_hi = std::max(tau_hi, hi(i) - y(i));
  }
  auto sum_at = [&](double tau) {
    double s = 0.0;
    for (int i : idx) s += clip(y(i) + tau, lo(i), hi(i));
    return s;
  };
  double a = tau_lo, b = tau_hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (sum_at(mid) < total)
      a = mid;
    else
      b = mid;
    if (b - a <= 1e-16 * std::max(1.0, std::abs(a) + std::abs(b))) break;
  }
  const double tau = 0.5 * (a + b);
  for (int i : idx) x(i) = clip(y(i) + tau, lo(i), hi(i));
}

}  // namespace

ConstraintSet ConstraintSet::free_box(int n) {
  ConstraintSet c;
  c.lower = Eigen::VectorXd::Constant(n, -kInf);
  c.upper = Eigen::VectorXd::Constant(n, kInf);
  return c;
}

bool ConstraintSet::blocks_consistent() const {
  if ((lower.array() > upper.array()).any()) return false;
  for (const auto& blk : simplex_blocks) {
    double lo_sum = 0.0, hi_sum = 0.0;
    for (int i : blk.indices) {
      lo_sum += lower(i);
      hi_sum += upper(i);
    }
    const double slack = 1e-12 * std::max(1.0, std::abs(blk.total));
    if (lo_sum > blk.total + slack || hi_sum < blk.total - slack) return false;
  }
  for (const auto& blk : sum_floor_blocks) {
    double hi_sum = 0.0;
    for (int i : blk.indices) hi_sum += upper(i);
    if (hi_sum < blk.min_total - 1e-12 * std::max(1.0, std::abs(blk.min_total)))
      return false;
  }
  return true;
}

Eigen::VectorXd ConstraintSet::project(const Eigen::VectorXd& y) const {
  Eigen::VectorXd x = y.cwiseMax(lower).cwiseMin(upper);
  for (const auto& blk : simplex_blocks)
    project_fixed_sum(x, y, blk.indices, lower, upper, blk.total);
  for (const auto& blk : sum_floor_blocks) {
    double s = 0.0;
    for (int i : blk.indices) s += x(i);
    if (s < blk.min_total)
      project_fixed_sum(x, y, blk.indices, lower, upper, blk.min_total);
  }
  return x;
}

double ConstraintSet::general_violation(const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (const auto& c : linear) v = std::max(v, c.coeff.dot(x) - c.rhs);
  for (const auto& c : quadratic) v = std::max(v, c.eval(x));
  return v;
}

namespace {

/// General constraints rescaled so their gradients have unit-order norm at
/// the start point; the multiplier iteration then progresses at a uniform
/// rate across constraints independent of the caller's units.
struct ScaledConstraints {
  std::vector<LinearConstraint> linear;
  std::vector<DiagQuadConstraint> quadratic;

  ScaledConstraints(const ConstraintSet& cs, const Eigen::VectorXd& x0) {
    for (const auto& c : cs.linear) {
      const double s = std::max(1e-12, c.coeff.norm());
      LinearConstraint sc;
      sc.coeff = c.coeff / s;
      sc.rhs = c.rhs / s;
      linear.push_back(std::move(sc));
    }
    for (const auto& c : cs.quadratic) {
      const Eigen::VectorXd grad0 =
          (2.0 * c.quad.array() * x0.array()).matrix() + c.lin;
      double s = grad0.norm();
      if (s < 1e-12)
        s = std::max({1e-12, c.quad.lpNorm<Eigen::Infinity>(),
                      c.lin.lpNorm<Eigen::Infinity>(), std::abs(c.constant)});
      DiagQuadConstraint sc;
      sc.quad = c.quad / s;
      sc.lin = c.lin / s;
      sc.constant = c.constant / s;
      quadratic.push_back(std::move(sc));
    }
  }

  double violation(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (const auto& c : linear) v = std::max(v, c.coeff.dot(x) - c.rhs);
    for (const auto& c : quadratic) v = std::max(v, c.eval(x));
    return v;
  }
};

struct AugmentedLagrangian {
  const Objective& f;
  const ScaledConstraints& sc;
  Eigen::VectorXd lambda_lin, lambda_quad;
  double rho;

  double eval(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    double val = f(x, grad);
    for (std::size_t c = 0; c < sc.linear.size(); ++c) {
      const double g = sc.linear[c].coeff.dot(x) - sc.linear[c].rhs;
      const double lam = lambda_lin(static_cast<Eigen::Index>(c));
      const double m = std::max(0.0, lam + rho * g);
      val += (m * m - lam * lam) / (2.0 * rho);
      if (m > 0.0) grad.noalias() += m * sc.linear[c].coeff;
    }
    for (std::size_t c = 0; c < sc.quadratic.size(); ++c) {
      const double g = sc.quadratic[c].eval(x);
      const double lam = lambda_quad(static_cast<Eigen::Index>(c));
      const double m = std::max(0.0, lam + rho * g);
      val += (m * m - lam * lam) / (2.0 * rho);
      if (m > 0.0) sc.quadratic[c].add_gradient(x, m, grad);
    }
    return val;
  }
};

struct InnerResult {
  Eigen::VectorXd x;
  double residual = kInf;
  int iterations = 0;
};

/// Damped projected Newton for box-only base sets: dense finite-difference
/// Hessian of the augmented Lagrangian, restricted to the free (inactive-
/// bound) coordinates, with Armijo backtracking on the projected step. The
/// per-slot power programs are tiny but badly conditioned for first-order
/// methods; exact curvature settles them in a handful of steps.
/// Residuals are unit-probe gradient-mapping norms: ||x - P(x - grad)||_inf.
InnerResult newton_minimize(const AugmentedLagrangian& L, const ConstraintSet& cs,
                            const Eigen::VectorXd& x0, double tol, int max_iters) {
  const Eigen::Index n = x0.size();
  Eigen::VectorXd x = cs.project(x0);
  Eigen::VectorXd grad(n), grad_probe(n), trial_grad(n);
  double fx = L.eval(x, grad);
  InnerResult best;
  best.x = x;

  for (int it = 0; it < max_iters; ++it) {
    const double residual = (x - cs.project(x - grad)).lpNorm<Eigen::Infinity>();
    best.iterations = it + 1;
    if (residual < best.residual) {
      best.residual = residual;
      best.x = x;
    }
    if (residual <= tol) break;

    // forward-difference Hessian; n extra gradient evaluations
    Eigen::MatrixXd H(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const double eps = 1e-7 * std::max(1.0, std::abs(x(c)));
      Eigen::VectorXd xp = x;
      xp(c) += eps;
      L.eval(xp, grad_probe);
      H.col(c) = (grad_probe - grad) / eps;
    }
    H = 0.5 * (H + H.transpose()).eval();

    // free = coordinates not pinned at an improving bound
    const double edge = 1e-10;
    std::vector<Eigen::Index> free;
    free.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_lo = x(i) <= cs.lower(i) + edge && grad(i) > 0.0;
      const bool at_hi = x(i) >= cs.upper(i) - edge && grad(i) < 0.0;
      if (!at_lo && !at_hi) free.push_back(i);
    }

    Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
    bool have_newton = false;
    if (!free.empty()) {
      const Eigen::Index m = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd Hf(m, m);
      Eigen::VectorXd gf(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        gf(a) = grad(free[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < m; ++b)
          Hf(a, b) = H(free[static_cast<std::size_t>(a)],
                       free[static_cast<std::size_t>(b)]);
      }
      double damping = 1e-10 * std::max(1.0, Hf.diagonal().cwiseAbs().maxCoeff());
      for (int attempt = 0; attempt < 12; ++attempt) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(
            Hf + damping * Eigen::MatrixXd::Identity(m, m));
        if (ldlt.info() == Eigen::Success) {
          const Eigen::VectorXd df = ldlt.solve(-gf);
          if (df.allFinite() && df.dot(gf) < 0.0) {
            for (Eigen::Index a = 0; a < m; ++a)
              dir(free[static_cast<std::size_t>(a)]) = df(a);
            have_newton = true;
            break;
          }
        }
        damping = std::max(damping * 100.0, 1e-8);
      }
    }
    if (!have_newton) dir = -grad;

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_next;
    double f_next = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      x_next = cs.project(x + alpha * dir);
      f_next = L.eval(x_next, trial_grad);
      const double pred = grad.dot(x_next - x);
      if (f_next <= fx + 1e-4 * std::min(pred, 0.0) +
                        1e-14 * std::max(1.0, std::abs(fx)) &&
          f_next <= fx + 1e-14 * std::max(1.0, std::abs(fx))) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    const double moved = (x_next - x).lpNorm<Eigen::Infinity>();
    x.swap(x_next);
    grad.swap(trial_grad);
    fx = f_next;
    if (moved <= 1e-15 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) break;
  }
  return best;
}

/// Spectral projected gradient (Barzilai-Borwein steps, nonmonotone Armijo
/// line search along the projection arc). The BB step tracks the local
/// curvature, which keeps the method effective when the penalty stiffens.
/// Residuals are unit-probe gradient-mapping norms: ||x - P(x - grad)||_inf.
InnerResult spg_minimize(const AugmentedLagrangian& L, const ConstraintSet& cs,
                         const Eigen::VectorXd& x0, double tol, int max_iters) {
  Eigen::VectorXd x = cs.project(x0);
  Eigen::VectorXd grad(x.size()), grad_next(x.size());
  double fx = L.eval(x, grad);

  constexpr int kMemory = 10;
  double recent[kMemory];
  std::fill(recent, recent + kMemory, fx);

  double step = 1.0;
  InnerResult best;
  best.x = x;

  for (int it = 0; it < max_iters; ++it) {
    const double residual = (x - cs.project(x - grad)).lpNorm<Eigen::Infinity>();
    best.iterations = it + 1;
    if (residual < best.residual) {
      best.residual = residual;
      best.x = x;
    }
    if (residual <= tol) break;

    Eigen::VectorXd d = cs.project(x - step * grad) - x;
    double gd = grad.dot(d);
    if (gd >= 0.0 || d.lpNorm<Eigen::Infinity>() == 0.0) {
      // the scaled arc collapsed; retry with a unit probe before giving up
      step = 1.0;
      d = cs.project(x - grad) - x;
      gd = grad.dot(d);
      if (gd >= 0.0) break;
    }

    const double f_ref = *std::max_element(recent, recent + kMemory);
    double lambda = 1.0;
    Eigen::VectorXd x_next;
    double f_next = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      x_next = x + lambda * d;
      f_next = L.eval(x_next, grad_next);
      if (f_next <= f_ref + 1e-4 * lambda * gd) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = x_next - x;
    const Eigen::VectorXd y = grad_next - grad;
    const double sy = s.dot(y);
    if (sy > 0.0)
      step = clip(s.squaredNorm() / sy, 1e-12, 1e12);
    else
      step = std::min(step * 2.0, 1e12);

    x.swap(x_next);
    grad.swap(grad_next);
    fx = f_next;
    recent[it % kMemory] = fx;
  }
  return best;
}

}  // namespace

KernelResult convex_kernel_minimize(const Objective& objective,
                                    const ConstraintSet& constraints,
                                    const Eigen::VectorXd& start,
                                    const KernelOptions& options) {
  KernelResult out;
  if (!constraints.blocks_consistent()) {
    out.x = start;
    out.status = SolveStatus::Infeasible;
    out.max_violation = kInf;
    out.kkt_residual = kInf;
    return out;
  }

  Eigen::VectorXd x = constraints.project(start);
  const ScaledConstraints scaled(constraints, x);
  const bool box_only =
      constraints.simplex_blocks.empty() && constraints.sum_floor_blocks.empty();
  // the Newton path shrugs at stiffness, so it can start with a penalty
  // heavy enough that the first minimizer barely leaves the feasible set
  double rho0 = box_only ? std::max(options.rho_init, 1e4) : options.rho_init;
  double rho_max = options.rho_max;
  if (const char* cap = std::getenv("HYBRIDCOMP_KERNEL_RHO_MAX")) {
    rho_max = std::atof(cap);
    rho0 = std::min(rho0, rho_max);
  }
  AugmentedLagrangian L{
      objective, scaled,
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scaled.linear.size())),
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scaled.quadratic.size())),
      rho0};
  int total_inner = 0;
  double residual = kInf;
  double prev_violation = kInf;

  for (int outer = 0; outer < options.max_outer; ++outer) {
    // inner accuracy tracks the outstanding violation so multiplier updates
    // act on trustworthy minimizers
    const double inner_tol = clip(0.05 * prev_violation, 0.2 * options.opt_tol, 1e-4);
    InnerResult inner =
        box_only ? newton_minimize(L, constraints, x, inner_tol,
                                   std::min(options.max_inner, 60))
                 : spg_minimize(L, constraints, x, inner_tol, options.max_inner);
    x = inner.x;
    residual = inner.residual;
    total_inner += inner.iterations;

    for (std::size_t c = 0; c < scaled.linear.size(); ++c) {
      const double g = scaled.linear[c].coeff.dot(x) - scaled.linear[c].rhs;
      auto& lam = L.lambda_lin(static_cast<Eigen::Index>(c));
      lam = std::max(0.0, lam + L.rho * g);
    }
    for (std::size_t c = 0; c < scaled.quadratic.size(); ++c) {
      const double g = scaled.quadratic[c].eval(x);
      auto& lam = L.lambda_quad(static_cast<Eigen::Index>(c));
      lam = std::max(0.0, lam + L.rho * g);
    }

    const double violation = constraints.general_violation(x);
    if (std::getenv("HYBRIDCOMP_KERNEL_TRACE")) {
      std::fprintf(stderr,
                   "[kernel] outer=%d rho=%.1e viol=%.3e res=%.3e inner=%d\n",
                   outer, L.rho, violation, residual, inner.iterations);
      if (std::getenv("HYBRIDCOMP_KERNEL_TRACE_CONSTRAINTS")) {
        for (std::size_t c = 0; c < scaled.linear.size(); ++c)
          std::fprintf(stderr, "  lin[%zu] g=%+.3e lam=%.3e\n", c,
                       scaled.linear[c].coeff.dot(x) - scaled.linear[c].rhs,
                       L.lambda_lin(static_cast<Eigen::Index>(c)));
        for (std::size_t c = 0; c < scaled.quadratic.size(); ++c)
          std::fprintf(stderr, "  quad[%zu] g=%+.3e lam=%.3e\n", c,
                       scaled.quadratic[c].eval(x),
                       L.lambda_quad(static_cast<Eigen::Index>(c)));
      }
    }
    if (violation <= options.feas_tol && residual <= options.opt_tol) {
      Eigen::VectorXd g(x.size());
      out.x = x;
      out.objective = objective(x, g);
      out.status = SolveStatus::Optimal;
      out.iterations = total_inner;
      out.kkt_residual = residual;
      out.max_violation = constraints.general_violation(x);
      return out;
    }
    // multiplier steps alone stall: raise the penalty moderately. A healthy
    // multiplier iteration contracts the violation by a constant factor per
    // outer pass, so only genuine stalls trigger growth.
    if (outer > 0 && violation > 0.75 * prev_violation)
      L.rho = std::min(rho_max, L.rho * options.rho_growth);
    prev_violation = violation;
  }

  Eigen::VectorXd g(x.size());
  out.x = x;
  out.objective = objective(x, g);
  out.iterations = total_inner;
  out.kkt_residual = residual;
  out.max_violation = constraints.general_violation(x);
  out.status = constraints.general_violation(x) > 1e-4 ? SolveStatus::Infeasible
                                          : SolveStatus::FeasibleSuboptimal;
  return out;
}

}  // namespace hybridcomp
