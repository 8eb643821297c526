#include "hybridcomp/subsolvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hybridcomp {

namespace {

KernelOptions kernel_options(const SystemConfig& config) {
  KernelOptions o;
  o.feas_tol = config.solver_feas_tol;
  o.opt_tol = config.solver_opt_tol;
  return o;
}

SolveStatus merge_status(SolveStatus a, SolveStatus b) {
  if (a == SolveStatus::Infeasible || b == SolveStatus::Infeasible)
    return SolveStatus::Infeasible;
  if (a == SolveStatus::FeasibleSuboptimal || b == SolveStatus::FeasibleSuboptimal)
    return SolveStatus::FeasibleSuboptimal;
  return SolveStatus::Optimal;
}

/// 2^(l*I/(T*B)) - 1, the SINR needed to carry l bits in one slot.
double required_sinr(const SystemConfig& config, double bits) {
  return std::exp2(bits / (config.slot_duration() * config.bandwidth_B)) - 1.0;
}

}  // namespace

std::complex<double> eta_closed_form(const SystemConfig& config,
                                     const Scenario& scenario,
                                     const DecisionSet& d, int slot) {
  std::complex<double> numer(0.0, 0.0);
  double denom = config.noise_power_sigma0sq;
  for (int j = 0; j < d.num_aircomp_J; ++j) {
    const std::complex<double> u =
        d.aircomp_tx_gain(j, slot) * scenario.aircomp_channel(j, slot);
    numer += std::conj(u);
    denom += std::norm(u);
  }
  for (int k = 0; k < d.num_edge_K; ++k) {
    const double a = d.schedule_weight(k, slot);
    denom += a * a * d.edge_tx_power(k, slot) * std::norm(scenario.edge_channel(k, slot));
  }
  if (denom <= 0.0)
    throw std::domain_error("eta_closed_form: degenerate slot (zero signal, noise and interference)");
  return numer / denom;
}

SolveOutcome solve_block_omega(const SystemConfig& config, const Scenario& scenario,
                               const DecisionSet& decisions) {
  SolveOutcome out;
  out.decisions = decisions;
  DecisionSet& d = out.decisions;
  const int K = d.num_edge_K;
  const int I = d.num_slots_I;
  const double cap_bits = config.max_bits_per_slot();

  for (int i = 0; i < I; ++i) {
    d.rx_gain(i) = eta_closed_form(config, scenario, d, i);
    const double mse = mse_analytic(config, scenario, d, i);
    if (mse > config.mse_threshold_zeta * (1.0 + config.solver_feas_tol)) {
      out.status = SolveStatus::Infeasible;
      out.blocking_family = ConstraintFamily::Mse;
      std::ostringstream msg;
      msg << "slot " << i << ": best-case MSE " << mse << " exceeds threshold "
          << config.mse_threshold_zeta;
      out.diagnostic = msg.str();
      out.objective = energy(config, d).total();
      return out;
    }
  }

  if (K == 0) {
    out.objective = energy(config, d).total();
    return out;
  }

  // per-(UE, slot) caps: achievable rate at the current powers and the
  // scheduling coupling l <= alpha * cap_bits. An incoming offload that sits
  // a solver-tolerance hair above its rate cap stays admissible, otherwise
  // the incoming feasible point could fall out of the block's feasible set.
  Eigen::MatrixXd cap(K, I);
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < I; ++i) {
      const double rate = rate_capacity_bits(config, scenario, d, k, i);
      const double couple = d.schedule_weight(k, i) * cap_bits;
      cap(k, i) = std::min(std::max(rate, std::min(d.offload_bits(k, i), couple)),
                           couple);
    }

  for (int k = 0; k < K; ++k) {
    if (cap.row(k).sum() < config.data_demand_Dk * (1.0 - 1e-12)) {
      out.status = SolveStatus::Infeasible;
      out.blocking_family = ConstraintFamily::Data;
      std::ostringstream msg;
      msg << "edge UE " << k << ": slot caps sum to " << cap.row(k).sum()
          << " bits < demand " << config.data_demand_Dk;
      out.diagnostic = msg.str();
      out.objective = energy(config, d).total();
      return out;
    }
  }

  // assemble the coupled convex program over entries with positive cap
  std::vector<std::pair<int, int>> vars;  // (k, i)
  Eigen::MatrixXi var_of = Eigen::MatrixXi::Constant(K, I, -1);
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < I; ++i)
      if (cap(k, i) > 0.0) {
        var_of(k, i) = static_cast<int>(vars.size());
        vars.emplace_back(k, i);
      }
  const int n = static_cast<int>(vars.size());
  const double l_ref = cap_bits;

  ConstraintSet cs = ConstraintSet::free_box(n);
  cs.lower.setZero();
  for (int v = 0; v < n; ++v)
    cs.upper(v) = cap(vars[static_cast<std::size_t>(v)].first,
                      vars[static_cast<std::size_t>(v)].second) /
                  l_ref;
  for (int k = 0; k < K; ++k) {
    SumFloorBlock blk;
    for (int i = 0; i < I; ++i)
      if (var_of(k, i) >= 0) blk.indices.push_back(var_of(k, i));
    blk.min_total = config.data_demand_Dk / l_ref;
    cs.sum_floor_blocks.push_back(std::move(blk));
  }
  if (!d.schedule_binary) {
    // relaxed schedules can stack several UEs in one slot; keep the BS
    // processing limit as an explicit linear constraint then
    for (int i = 0; i < I; ++i) {
      LinearConstraint lc;
      lc.coeff = Eigen::VectorXd::Zero(n);
      bool any = false;
      for (int k = 0; k < K; ++k)
        if (var_of(k, i) >= 0) {
          lc.coeff(var_of(k, i)) = d.schedule_weight(k, i);
          any = true;
        }
      lc.rhs = 1.0;  // sum alpha*l <= cap_bits, in l_ref = cap_bits units
      if (any) cs.linear.push_back(std::move(lc));
    }
  }

  // per-slot weighted loads drive the cubic objective
  std::vector<std::vector<int>> slot_vars(static_cast<std::size_t>(I));
  for (int v = 0; v < n; ++v)
    slot_vars[static_cast<std::size_t>(vars[static_cast<std::size_t>(v)].second)]
        .push_back(v);
  Eigen::VectorXd weight(n);
  for (int v = 0; v < n; ++v)
    weight(v) = d.schedule_weight(vars[static_cast<std::size_t>(v)].first,
                                  vars[static_cast<std::size_t>(v)].second);

  Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    grad.setZero(x.size());
    double val = 0.0;
    for (int i = 0; i < I; ++i) {
      double load = 0.0;
      for (int v : slot_vars[static_cast<std::size_t>(i)]) load += weight(v) * x(v);
      val += load * load * load;
      const double dcub = 3.0 * load * load;
      for (int v : slot_vars[static_cast<std::size_t>(i)]) grad(v) += dcub * weight(v);
    }
    return val;
  };

  Eigen::VectorXd start(n);
  for (int v = 0; v < n; ++v)
    start(v) = d.offload_bits(vars[static_cast<std::size_t>(v)].first,
                              vars[static_cast<std::size_t>(v)].second) /
               l_ref;

  KernelResult res = convex_kernel_minimize(objective, cs, start, kernel_options(config));

  d.offload_bits.setZero();
  for (int v = 0; v < n; ++v)
    d.offload_bits(vars[static_cast<std::size_t>(v)].first,
                   vars[static_cast<std::size_t>(v)].second) = res.x(v) * l_ref;

  out.status = res.status;
  out.iterations = res.iterations;
  out.kkt_residual = res.kkt_residual;
  if (res.status == SolveStatus::Infeasible) {
    out.blocking_family = ConstraintFamily::Data;
    out.diagnostic = "offload program reported infeasible";
  }
  out.objective = energy(config, d).total();
  return out;
}

SolveOutcome solve_block_theta(const SystemConfig& config, const Scenario& scenario,
                               const DecisionSet& decisions) {
  SolveOutcome out;
  out.decisions = decisions;
  DecisionSet& d = out.decisions;
  const int J = d.num_aircomp_J;
  const int K = d.num_edge_K;
  const int I = d.num_slots_I;
  const double pa = config.p_max_aircomp;
  const double pe = config.p_max_edge;
  const double zeta = config.mse_threshold_zeta;
  const double sigma = config.noise_power_sigma0sq;
  const int n = 2 * J + K;  // per-slot: aligned terms, slacks, edge powers

  int total_iters = 0;
  double worst_kkt = 0.0;
  SolveStatus status = SolveStatus::Optimal;

  for (int i = 0; i < I; ++i) {
    const std::complex<double> eta = d.rx_gain(i);
    const double eta2 = std::norm(eta);

    // Variables per slot, chosen so every constraint row is O(1) even though
    // the raw powers live many decades below their budgets:
    //   x[j]      = |eta h_j b_j|          (aligned aggregation term, ~1)
    //   x[J + j]  = |eta h_j|^2 psi_j      (slack in aligned-term units)
    //   x[2J + k] = p_k / p_ref_k          (power against a slot reference)
    Eigen::VectorXd c_align(J);  // |eta h_j|
    Eigen::VectorXd h2_air(J);   // |h_j|^2
    for (int j = 0; j < J; ++j) {
      c_align(j) = std::abs(eta * scenario.aircomp_channel(j, i));
      h2_air(j) = std::norm(scenario.aircomp_channel(j, i));
    }

    // cheapest reachable MSE ignoring edge interference; a sure
    // infeasibility witness when it already exceeds the budget
    double mse_floor = eta2 * sigma;
    for (int j = 0; j < J; ++j) {
      const double best = std::max(0.0, 1.0 - c_align(j) * std::sqrt(pa));
      mse_floor += best * best;
    }
    if (mse_floor > zeta * (1.0 + config.solver_feas_tol)) {
      out.status = SolveStatus::Infeasible;
      out.blocking_family = ConstraintFamily::Mse;
      std::ostringstream msg;
      msg << "slot " << i << ": MSE floor " << mse_floor << " exceeds threshold "
          << zeta;
      out.diagnostic = msg.str();
      out.objective = energy(config, d).total();
      return out;
    }

    double interference_in = sigma;
    for (int j = 0; j < J; ++j)
      interference_in += std::norm(scenario.aircomp_channel(j, i) * d.aircomp_tx_gain(j, i));

    Eigen::VectorXd h2_edge(K), sched(K), p_ref(K);
    for (int k = 0; k < K; ++k) {
      h2_edge(k) = std::norm(scenario.edge_channel(k, i));
      sched(k) = d.schedule_weight(k, i);
      const double bits = d.offload_bits(k, i);
      double ref = pe;
      if (bits > 0.0 && h2_edge(k) > 0.0) {
        // power carrying the slot's traffic at the incoming interference
        ref = required_sinr(config, bits) * interference_in / h2_edge(k);
        ref = std::min(std::max(ref, 1e-12 * pe), pe);
      }
      p_ref(k) = ref;
    }

    ConstraintSet cs = ConstraintSet::free_box(n);
    cs.lower.setZero();
    for (int j = 0; j < J; ++j) {
      cs.upper(j) = c_align(j) * std::sqrt(pa);
      cs.upper(J + j) = c_align(j) * c_align(j) * pa;
    }
    for (int k = 0; k < K; ++k) cs.upper(2 * J + k) = pe / p_ref(k);

    // MSE budget, normalized by the threshold
    DiagQuadConstraint mse;
    mse.quad = Eigen::VectorXd::Zero(n);
    mse.lin = Eigen::VectorXd::Zero(n);
    mse.constant = (static_cast<double>(J) + eta2 * sigma - zeta) / zeta;
    for (int j = 0; j < J; ++j) {
      mse.quad(j) = 1.0 / zeta;
      mse.lin(j) = -2.0 / zeta;
    }
    for (int k = 0; k < K; ++k)
      mse.lin(2 * J + k) =
          eta2 * sched(k) * sched(k) * h2_edge(k) * p_ref(k) / zeta;
    cs.quadratic.push_back(std::move(mse));

    // slack definition, gain^2 <= psi, in aligned-term units: x_j^2 <= x_{J+j}
    for (int j = 0; j < J; ++j) {
      if (c_align(j) <= 0.0) {
        cs.upper(j) = 0.0;  // receive gain nulls this UE; pin its term
        cs.upper(J + j) = 0.0;
        continue;
      }
      DiagQuadConstraint sq;
      sq.quad = Eigen::VectorXd::Zero(n);
      sq.lin = Eigen::VectorXd::Zero(n);
      sq.quad(j) = 1.0;
      sq.lin(J + j) = -1.0;
      cs.quadratic.push_back(std::move(sq));
    }

    // exponential-form rate constraints for slots carrying offload traffic;
    // |h_j|^2 psi_j = x_{J+j} / eta^2, so the slack coefficients collapse to
    // a j-independent constant
    for (int k = 0; k < K; ++k) {
      const double bits = d.offload_bits(k, i);
      if (bits <= 0.0) continue;
      const double g = required_sinr(config, bits);
      if (h2_edge(k) <= 0.0) {
        out.status = SolveStatus::Infeasible;
        out.blocking_family = ConstraintFamily::Rate;
        out.diagnostic = "zero edge channel with positive offload";
        out.objective = energy(config, d).total();
        return out;
      }
      LinearConstraint lc;
      lc.coeff = Eigen::VectorXd::Zero(n);
      const double denom = p_ref(k) * h2_edge(k);
      for (int j = 0; j < J; ++j)
        if (eta2 > 0.0) lc.coeff(J + j) = g / (eta2 * denom);
      lc.coeff(2 * J + k) = -1.0;
      lc.rhs = -g * sigma / denom;
      cs.linear.push_back(std::move(lc));
    }

    // transmit energy in watts, normalized by its value at the incoming point
    Eigen::VectorXd obj_w(J);
    for (int j = 0; j < J; ++j) {
      const double c2 = c_align(j) * c_align(j);
      obj_w(j) = c2 > 0.0 ? 1.0 / c2 : 0.0;
    }
    Eigen::VectorXd start(n);
    for (int j = 0; j < J; ++j) {
      start(j) = std::abs(eta * scenario.aircomp_channel(j, i) * d.aircomp_tx_gain(j, i));
      start(J + j) = c_align(j) * c_align(j) * d.aircomp_power_slack(j, i);
    }
    for (int k = 0; k < K; ++k) start(2 * J + k) = d.edge_tx_power(k, i) / p_ref(k);

    double f_ref = 0.0;
    for (int j = 0; j < J; ++j) f_ref += obj_w(j) * start(j) * start(j);
    for (int k = 0; k < K; ++k) f_ref += sched(k) * p_ref(k) * start(2 * J + k);
    if (f_ref <= 0.0) f_ref = 1.0;

    Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
      grad.setZero(n);
      double val = 0.0;
      for (int j = 0; j < J; ++j) {
        val += obj_w(j) * x(j) * x(j);
        grad(j) = 2.0 * obj_w(j) * x(j) / f_ref;
      }
      for (int k = 0; k < K; ++k) {
        val += sched(k) * p_ref(k) * x(2 * J + k);
        grad(2 * J + k) = sched(k) * p_ref(k) / f_ref;
      }
      return val / f_ref;
    };

    KernelResult res = convex_kernel_minimize(objective, cs, start, kernel_options(config));
    total_iters += res.iterations;
    worst_kkt = std::max(worst_kkt, res.kkt_residual);

    if (res.status == SolveStatus::Infeasible) {
      // a feasible warm start means the failure is numerical; keep the
      // incoming slot untouched in that case
      const bool start_ok =
          cs.general_violation(cs.project(start)) <= 1e2 * config.solver_feas_tol;
      if (!start_ok) {
        out.status = SolveStatus::Infeasible;
        out.blocking_family = ConstraintFamily::Mse;
        std::ostringstream msg;
        msg << "slot " << i << ": transmit-power program infeasible";
        out.diagnostic = msg.str();
        out.objective = energy(config, d).total();
        return out;
      }
      status = merge_status(status, SolveStatus::FeasibleSuboptimal);
      continue;
    }
    status = merge_status(status, res.status);

    // map back: rebuild gains with phases aligned against the receive gain
    for (int j = 0; j < J; ++j) {
      const double amplitude = c_align(j) > 0.0 ? res.x(j) / c_align(j) : 0.0;
      const std::complex<double> hh = eta * scenario.aircomp_channel(j, i);
      std::complex<double> phase(1.0, 0.0);
      if (std::abs(hh) > 0.0) phase = std::conj(hh) / std::abs(hh);
      d.aircomp_tx_gain(j, i) = amplitude * phase;
      // the slack carries no cost, so pin it to its tight value
      const double c2 = c_align(j) * c_align(j);
      const double solved_slack = c2 > 0.0 ? res.x(J + j) / c2 : 0.0;
      if (solved_slack < amplitude * amplitude - 1e-6 * pa)
        out.diagnostic = "slack below squared amplitude beyond tolerance";
      d.aircomp_power_slack(j, i) = amplitude * amplitude;
    }
    for (int k = 0; k < K; ++k) d.edge_tx_power(k, i) = res.x(2 * J + k) * p_ref(k);
  }

  out.status = status;
  out.iterations = total_iters;
  out.kkt_residual = worst_kkt;
  out.objective = energy(config, d).total();
  return out;
}

SolveOutcome solve_block_xi(const SystemConfig& config, const Scenario& scenario,
                            const DecisionSet& decisions) {
  SolveOutcome out;
  out.decisions = decisions;
  DecisionSet& d = out.decisions;
  const int K = d.num_edge_K;
  const int I = d.num_slots_I;
  const double tau = config.slot_duration();
  const double zeta = config.mse_threshold_zeta;
  const double cap_bits = config.max_bits_per_slot();
  const double cube_coeff =
      config.capacitance_gamma * std::pow(config.cycles_per_bit_c0, 3) / (tau * tau);

  if (K == 0) {
    out.objective = energy(config, d).total();
    return out;
  }

  int total_iters = 0;
  double worst_kkt = 0.0;
  SolveStatus status = SolveStatus::Optimal;

  for (int i = 0; i < I; ++i) {
    const std::complex<double> eta = d.rx_gain(i);
    const double eta2 = std::norm(eta);

    double mse_fixed = eta2 * config.noise_power_sigma0sq;
    for (int j = 0; j < d.num_aircomp_J; ++j)
      mse_fixed += std::norm(eta * d.aircomp_tx_gain(j, i) *
                                 scenario.aircomp_channel(j, i) -
                             1.0);
    const double mse_budget = zeta - mse_fixed;
    if (mse_budget < -zeta * config.solver_feas_tol) {
      out.status = SolveStatus::Infeasible;
      out.blocking_family = ConstraintFamily::Mse;
      std::ostringstream msg;
      msg << "slot " << i << ": fixed MSE terms " << mse_fixed
          << " already exceed threshold " << zeta;
      out.diagnostic = msg.str();
      out.objective = energy(config, d).total();
      return out;
    }

    ConstraintSet cs = ConstraintSet::free_box(K);
    double lo_sum = 0.0;
    for (int k = 0; k < K; ++k) {
      cs.lower(k) = std::min(1.0, d.offload_bits(k, i) / cap_bits);
      cs.upper(k) = 1.0;
      lo_sum += cs.lower(k);
    }
    if (lo_sum > 1.0 + 1e-12) {
      out.status = SolveStatus::Infeasible;
      out.blocking_family = ConstraintFamily::Capacity;
      std::ostringstream msg;
      msg << "slot " << i << ": offloads exceed the slot capacity";
      out.diagnostic = msg.str();
      out.objective = energy(config, d).total();
      return out;
    }
    SimplexBlock simplex;
    for (int k = 0; k < K; ++k) simplex.indices.push_back(k);
    simplex.total = 1.0;
    cs.simplex_blocks.push_back(std::move(simplex));

    Eigen::VectorXd p(K), l(K), w_mse(K);
    for (int k = 0; k < K; ++k) {
      p(k) = d.edge_tx_power(k, i);
      l(k) = d.offload_bits(k, i);
      w_mse(k) = eta2 * std::norm(scenario.edge_channel(k, i)) * p(k);
    }

    DiagQuadConstraint mse;
    mse.quad = w_mse / zeta;
    mse.lin = Eigen::VectorXd::Zero(K);
    mse.constant = -mse_budget / zeta;
    cs.quadratic.push_back(std::move(mse));

    LinearConstraint capc;
    capc.coeff = config.cycles_per_bit_c0 * l / (tau * config.max_cpu_f);
    capc.rhs = 1.0;
    cs.linear.push_back(std::move(capc));

    const double max_l = l.maxCoeff();
    const double f_ref =
        std::max(tau * p.maxCoeff() + cube_coeff * max_l * max_l * max_l, 1e-18);

    Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
      double load = l.dot(x);
      double val = tau * p.dot(x) + cube_coeff * load * load * load;
      grad = (tau * p + 3.0 * cube_coeff * load * load * l) / f_ref;
      return val / f_ref;
    };

    Eigen::VectorXd start(K);
    for (int k = 0; k < K; ++k) start(k) = d.schedule_weight(k, i);

    KernelResult res = convex_kernel_minimize(objective, cs, start, kernel_options(config));
    total_iters += res.iterations;
    worst_kkt = std::max(worst_kkt, res.kkt_residual);
    status = merge_status(status, res.status);
    if (res.status == SolveStatus::Infeasible) {
      out.status = SolveStatus::Infeasible;
      out.blocking_family = ConstraintFamily::Mse;
      std::ostringstream msg;
      msg << "slot " << i << ": scheduling program infeasible";
      out.diagnostic = msg.str();
      out.objective = energy(config, d).total();
      return out;
    }
    for (int k = 0; k < K; ++k) d.schedule_weight(k, i) = res.x(k);
  }

  d.schedule_binary = false;
  out.status = status;
  out.iterations = total_iters;
  out.kkt_residual = worst_kkt;
  out.objective = energy(config, d).total();
  return out;
}

DecisionSet round_schedule(const SystemConfig& config, const Scenario& scenario,
                           const DecisionSet& relaxed) {
  (void)config;
  (void)scenario;
  DecisionSet d = relaxed;
  for (int i = 0; i < d.num_slots_I; ++i) {
    const int winner = d.scheduled_ue(i);
    for (int k = 0; k < d.num_edge_K; ++k) {
      const bool win = (k == winner);
      d.schedule_weight(k, i) = win ? 1.0 : 0.0;
      if (!win) d.offload_bits(k, i) = 0.0;
    }
  }
  d.schedule_binary = true;
  return d;
}

}  // namespace hybridcomp
