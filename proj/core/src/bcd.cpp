#include "hybridcomp/bcd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hybridcomp {

const char* termination_reason_name(TerminationReason r) {
  switch (r) {
    case TerminationReason::Converged: return "converged";
    case TerminationReason::MaxIterations: return "max-iters";
    case TerminationReason::Infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

using nlohmann::json;

json block_json(const BlockSummary& b) {
  return json{{"status", solve_status_name(b.status)},
              {"iterations", b.iterations},
              {"kkt_residual", b.kkt_residual}};
}

json feasibility_json(const FeasibilityReport& r) {
  return json{{"schedule", r.schedule},   {"edge_power", r.edge_power},
              {"aircomp_power", r.aircomp_power}, {"mse", r.mse},
              {"data", r.data},           {"capacity", r.capacity},
              {"rate", r.rate},           {"coupling", r.coupling},
              {"feasible", r.feasible}};
}

BlockSummary summarize(const SolveOutcome& o) {
  return BlockSummary{o.status, o.iterations, o.kkt_residual};
}

double rel_gap(double prev, double now) {
  return std::abs(prev - now) / std::max(std::abs(prev), 1e-300);
}

}  // namespace

void write_trace_jsonl(const IterationTrace& trace, std::ostream& out) {
  for (const auto& rec : trace.records) {
    json row{{"iteration", rec.iteration},
             {"e_edge_tran_J", rec.energy.e_edge_tran},
             {"e_aircomp_tran_J", rec.energy.e_aircomp_tran},
             {"e_comp_J", rec.energy.e_comp},
             {"e_total_J", rec.energy.total()},
             {"omega", block_json(rec.omega)},
             {"theta", block_json(rec.theta)},
             {"xi", block_json(rec.xi)},
             {"feasibility", feasibility_json(rec.feasibility)},
             {"schedule_changed", rec.schedule_changed},
             {"schedule_accepted", rec.schedule_accepted},
             {"wall_ms", rec.wall_ms}};
    out << row.dump() << "\n";
  }
  json summary{{"summary", true},
               {"initial_energy_J", trace.initial_energy},
               {"iterations", trace.iterations()},
               {"termination", termination_reason_name(trace.reason)},
               {"diagnostic", trace.diagnostic},
               {"total_wall_ms", trace.total_wall_ms}};
  out << summary.dump() << "\n";
}

void write_trace_jsonl_file(const IterationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  write_trace_jsonl(trace, out);
  if (!out) throw IoError("write failed: " + path);
}

DecisionSet initialize_feasible(const SystemConfig& config, const Scenario& scenario,
                                const StreamRng& rng) {
  const int K = scenario.num_edge_K;
  const int J = scenario.num_aircomp_J;
  const int I = scenario.num_slots_I;
  const double tau = config.slot_duration();
  const double cap_bits = config.max_bits_per_slot();
  const double sigma = config.noise_power_sigma0sq;

  DecisionSet d = DecisionSet::zeros(K, J, I);
  d.schedule_binary = true;

  // round-robin schedule; every edge UE needs at least one slot
  std::vector<int> slots_of(static_cast<std::size_t>(K), 0);
  for (int i = 0; i < I; ++i) {
    if (K == 0) break;
    const int k = i % K;
    d.schedule_weight(k, i) = 1.0;
    ++slots_of[static_cast<std::size_t>(k)];
  }
  for (int k = 0; k < K; ++k)
    if (slots_of[static_cast<std::size_t>(k)] == 0)
      throw InfeasibleInstanceError(
          ConstraintFamily::Data,
          "fewer slots than edge UEs: UE " + std::to_string(k) + " gets no slot");

  // equal demand split across each UE's scheduled slots
  for (int k = 0; k < K; ++k) {
    const double per_slot = config.data_demand_Dk /
                            static_cast<double>(slots_of[static_cast<std::size_t>(k)]);
    if (per_slot > cap_bits * (1.0 + 1e-12))
      throw InfeasibleInstanceError(
          ConstraintFamily::Capacity,
          "equal split " + std::to_string(per_slot) +
              " bits exceeds per-slot processing capacity " + std::to_string(cap_bits));
    for (int i = 0; i < I; ++i)
      if (d.schedule_weight(k, i) > 0.0) d.offload_bits(k, i) = per_slot;
  }

  // a demand no power level can carry over the UE's slots is a sure witness
  for (int k = 0; k < K; ++k) {
    double best_sum = 0.0;
    for (int i = 0; i < I; ++i) {
      if (d.schedule_weight(k, i) <= 0.0) continue;
      const double sinr_best = config.p_max_edge *
                               std::norm(scenario.edge_channel(k, i)) / sigma;
      best_sum += std::min(cap_bits,
                           tau * config.bandwidth_B * std::log2(1.0 + sinr_best));
    }
    if (best_sum < config.data_demand_Dk)
      throw InfeasibleInstanceError(
          ConstraintFamily::Data,
          "edge UE " + std::to_string(k) + " cannot carry its demand even at max power");
  }

  // randomized channel-inversion amplitudes, phase-aligned so every
  // aggregation term lands on the positive real axis
  SplitMix64 g = rng.stream(rng_purpose::kInitializer);
  Eigen::MatrixXd amp(std::max(J, 1), I);
  for (int i = 0; i < I; ++i) {
    double min_h = 0.0;
    for (int j = 0; j < J; ++j) {
      const double a = std::abs(scenario.aircomp_channel(j, i));
      min_h = (j == 0) ? a : std::min(min_h, a);
    }
    for (int j = 0; j < J; ++j) {
      // narrow randomization band: amplitude spread itself costs distortion
      // (the receive gain cannot equalize unequal aggregation terms), about
      // J * cv^2 of the budget, so keep the coefficient of variation small
      const double h2 = std::norm(scenario.aircomp_channel(j, i));
      amp(j, i) = std::sqrt(config.p_max_aircomp) * g.uniform(0.85, 1.0) * min_h /
                  std::sqrt(h2 + sigma);
    }
  }

  auto apply_gain_scale = [&](double scale) {
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j) {
        const std::complex<double> h = scenario.aircomp_channel(j, i);
        const std::complex<double> phase =
            std::abs(h) > 0.0 ? std::conj(h) / std::abs(h) : std::complex<double>(1.0, 0.0);
        const double a = std::min(scale * amp(j, i), std::sqrt(config.p_max_aircomp));
        d.aircomp_tx_gain(j, i) = a * phase;
        d.aircomp_power_slack(j, i) = a * a;
      }
  };

  auto set_eta_and_power = [&]() -> bool {
    for (int i = 0; i < I; ++i) {
      // powers feed the eta denominator; set eta from the gains alone first
      for (int k = 0; k < K; ++k) d.edge_tx_power(k, i) = 0.0;
      d.rx_gain(i) = (J > 0) ? eta_closed_form(config, scenario, d, i)
                             : std::complex<double>(0.0, 0.0);
      double interference = sigma;
      for (int j = 0; j < J; ++j)
        interference +=
            std::norm(scenario.aircomp_channel(j, i) * d.aircomp_tx_gain(j, i));
      for (int k = 0; k < K; ++k) {
        const double bits = d.offload_bits(k, i);
        if (bits <= 0.0) continue;
        const double sinr = std::exp2(bits / (tau * config.bandwidth_B)) - 1.0;
        const double p = sinr * interference / std::norm(scenario.edge_channel(k, i));
        if (p > config.p_max_edge * (1.0 + 1e-12)) return false;
        d.edge_tx_power(k, i) = p;
      }
      d.rx_gain(i) = (J > 0) ? eta_closed_form(config, scenario, d, i)
                             : std::complex<double>(0.0, 0.0);
    }
    return true;
  };

  // the window of workable gain scales is an interval: edge powers grow with
  // the gains (more interference), distortion shrinks with them, so bracket
  // the largest power-feasible scale and verify the budget there
  const double target = config.mse_threshold_zeta * (1.0 - 1e-9);
  auto worst_mse = [&]() {
    double worst = 0.0;
    for (int i = 0; i < I; ++i)
      worst = std::max(worst, mse_analytic(config, scenario, d, i));
    return worst;
  };

  double scale = 1.0;
  bool powers_ok = false;
  for (int attempt = 0; attempt < 80; ++attempt) {
    apply_gain_scale(scale);
    if (set_eta_and_power()) {
      powers_ok = true;
      break;
    }
    scale *= 0.7;
  }
  if (!powers_ok)
    throw InfeasibleInstanceError(
        ConstraintFamily::EdgePower,
        "minimum edge power exceeds the budget even with vanishing gains");
  if (J > 0 && worst_mse() > target)
    throw InfeasibleInstanceError(
        ConstraintFamily::Mse,
        "mse budget unreachable at the largest power-feasible gain scale (floor " +
            std::to_string(worst_mse()) + " > " +
            std::to_string(config.mse_threshold_zeta) + ")");

  // frugality pass: shrink toward the smallest scale that still meets the
  // budget
  double lo = 0.0, hi = scale;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    apply_gain_scale(mid);
    if (set_eta_and_power() && worst_mse() <= target)
      hi = mid;
    else
      lo = mid;
  }
  apply_gain_scale(hi);
  if (!set_eta_and_power() || (J > 0 && worst_mse() > config.mse_threshold_zeta))
    throw InfeasibleInstanceError(ConstraintFamily::Mse,
                                  "gain rescaling failed to settle inside the budget");

  const FeasibilityReport report = check_feasibility(config, scenario, d, 1e-6);
  if (!report.feasible)
    throw InfeasibleInstanceError(
        report.worst_family(),
        std::string("constructed start violates ") +
            constraint_family_name(report.worst_family()) + " (residual " +
            std::to_string(report.worst()) + ")");
  return d;
}

BcdResult run_bcd(const SystemConfig& config, const Scenario& scenario,
                  const StreamRng& rng) {
  using clock = std::chrono::steady_clock;
  const auto t_run0 = clock::now();

  BcdResult out;
  DecisionSet x = initialize_feasible(config, scenario, rng);
  out.trace.initial_energy = energy(config, x).total();
  double e_prev = out.trace.initial_energy;

  for (int t = 1; t <= config.bcd_max_iters; ++t) {
    const auto t_it0 = clock::now();
    IterationRecord rec;
    rec.iteration = t;

    SolveOutcome omega = solve_block_omega(config, scenario, x);
    rec.omega = summarize(omega);
    if (omega.status == SolveStatus::Infeasible) {
      out.trace.reason = TerminationReason::Infeasible;
      out.trace.diagnostic = "offload block: " + omega.diagnostic;
      out.trace.records.push_back(rec);
      break;
    }
    if (omega.objective <= energy(config, x).total() * (1.0 + 1e-9)) {
      x = std::move(omega.decisions);
    } else {
      // inexact solve came back worse; keep the offloads, take the
      // energy-neutral receive-gain update
      x.rx_gain = omega.decisions.rx_gain;
    }

    SolveOutcome theta = solve_block_theta(config, scenario, x);
    rec.theta = summarize(theta);
    if (theta.status == SolveStatus::Infeasible) {
      out.trace.reason = TerminationReason::Infeasible;
      out.trace.diagnostic = "power block: " + theta.diagnostic;
      out.trace.records.push_back(rec);
      break;
    }
    if (theta.objective <= energy(config, x).total() * (1.0 + 1e-9))
      x = std::move(theta.decisions);

    SolveOutcome xi = solve_block_xi(config, scenario, x);
    rec.xi = summarize(xi);
    if (xi.status != SolveStatus::Infeasible) {
      DecisionSet candidate = round_schedule(config, scenario, xi.decisions);
      rec.schedule_changed = (candidate.schedule_weight != x.schedule_weight);
      // a candidate that leaves some UE without enough scheduled capacity for
      // its demand cannot be repaired; skip the repair solves outright
      bool candidate_plausible = true;
      for (int k = 0; k < candidate.num_edge_K && candidate_plausible; ++k) {
        const double slots = candidate.schedule_weight.row(k).sum();
        if (slots * config.max_bits_per_slot() <
            config.data_demand_Dk * (1.0 - 1e-12))
          candidate_plausible = false;
      }
      if (rec.schedule_changed && candidate_plausible) {
        // rounding may strand demand on unscheduled slots; re-route and
        // re-price before deciding whether the new schedule wins
        SolveOutcome repair_omega = solve_block_omega(config, scenario, candidate);
        if (repair_omega.status != SolveStatus::Infeasible) {
          SolveOutcome repair_theta =
              solve_block_theta(config, scenario, repair_omega.decisions);
          if (repair_theta.status != SolveStatus::Infeasible) {
            const double e_cand = energy(config, repair_theta.decisions).total();
            const double e_cur = energy(config, x).total();
            const FeasibilityReport cand_report =
                check_feasibility(config, scenario, repair_theta.decisions, 1e-6);
            if (cand_report.feasible && e_cand < e_cur * (1.0 - 1e-12)) {
              x = std::move(repair_theta.decisions);
              rec.schedule_accepted = true;
            }
          }
        }
      }
    }

    rec.energy = energy(config, x);
    rec.feasibility = check_feasibility(config, scenario, x, 1e-6);
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(clock::now() - t_it0).count();
    out.trace.records.push_back(rec);

    const double e_now = rec.energy.total();
    if (rel_gap(e_prev, e_now) < config.bcd_epsilon0) {
      out.trace.reason = TerminationReason::Converged;
      e_prev = e_now;
      break;
    }
    e_prev = e_now;
    if (t == config.bcd_max_iters) out.trace.reason = TerminationReason::MaxIterations;
  }

  out.decisions = std::move(x);
  out.trace.total_wall_ms =
      std::chrono::duration<double, std::milli>(clock::now() - t_run0).count();
  return out;
}

ComplexityEstimate complexity_estimate(const SystemConfig& config) {
  const double i = static_cast<double>(config.num_slots_I);
  const double j = static_cast<double>(config.num_aircomp_J);
  const double k = static_cast<double>(config.num_edge_K);
  ComplexityEstimate c;
  c.omega_ops = std::pow(i * (1.0 + k), 3.5);
  c.theta_ops = std::pow(i * (2.0 * j + k), 3.5);
  c.xi_ops = std::pow(i * k, 3.5);
  return c;
}

}  // namespace hybridcomp
