#include "hybridcomp/baselines.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "hybridcomp/bcd.hpp"
#include "hybridcomp/subsolvers.hpp"

namespace hybridcomp {

namespace {

/// Minimum-power edge transmit update with the AirComp gains held fixed:
/// per scheduled slot, the power meeting the rate constraint with equality.
/// Returns false (naming the family) when a budget breaks.
bool frozen_gain_power_update(const SystemConfig& config, const Scenario& scenario,
                              DecisionSet& d, ConstraintFamily& family,
                              std::string& diagnostic) {
  const double tau = config.slot_duration();
  for (int i = 0; i < d.num_slots_I; ++i) {
    double interference = config.noise_power_sigma0sq;
    for (int j = 0; j < d.num_aircomp_J; ++j)
      interference +=
          std::norm(scenario.aircomp_channel(j, i) * d.aircomp_tx_gain(j, i));
    for (int k = 0; k < d.num_edge_K; ++k) {
      const double bits = d.offload_bits(k, i);
      if (bits <= 0.0) {
        d.edge_tx_power(k, i) = 0.0;
        continue;
      }
      const double sinr = std::exp2(bits / (tau * config.bandwidth_B)) - 1.0;
      const double p =
          sinr * interference / std::norm(scenario.edge_channel(k, i));
      if (p > config.p_max_edge * (1.0 + 1e-12)) {
        family = ConstraintFamily::EdgePower;
        std::ostringstream msg;
        msg << "slot " << i << ": required power " << p << " W exceeds budget";
        diagnostic = msg.str();
        return false;
      }
      d.edge_tx_power(k, i) = p;
    }
    d.rx_gain(i) = (d.num_aircomp_J > 0)
                       ? eta_closed_form(config, scenario, d, i)
                       : std::complex<double>(0.0, 0.0);
    const double mse = mse_analytic(config, scenario, d, i);
    if (mse > config.mse_threshold_zeta * (1.0 + 1e-9)) {
      family = ConstraintFamily::Mse;
      std::ostringstream msg;
      msg << "slot " << i << ": MSE " << mse << " at the frozen gains exceeds "
          << config.mse_threshold_zeta;
      diagnostic = msg.str();
      return false;
    }
  }
  return true;
}

/// Round-robin schedule with each UE's demand split uniformly; shared by both
/// baselines (mirrors the start used by the descent runs).
DecisionSet uniform_schedule_split(const SystemConfig& config,
                                   const Scenario& scenario) {
  const int K = scenario.num_edge_K;
  const int I = scenario.num_slots_I;
  DecisionSet d = DecisionSet::zeros(K, scenario.num_aircomp_J, I);
  d.schedule_binary = true;
  std::vector<int> slots_of(static_cast<std::size_t>(K), 0);
  for (int i = 0; i < I && K > 0; ++i) {
    d.schedule_weight(i % K, i) = 1.0;
    ++slots_of[static_cast<std::size_t>(i % K)];
  }
  for (int k = 0; k < K; ++k) {
    if (slots_of[static_cast<std::size_t>(k)] == 0)
      throw InfeasibleInstanceError(ConstraintFamily::Data,
                                    "fewer slots than edge UEs");
    const double per_slot =
        config.data_demand_Dk / static_cast<double>(slots_of[static_cast<std::size_t>(k)]);
    if (per_slot > config.max_bits_per_slot() * (1.0 + 1e-12))
      throw InfeasibleInstanceError(
          ConstraintFamily::Capacity,
          "uniform split exceeds the per-slot processing capacity");
    for (int i = 0; i < I; ++i)
      if (d.schedule_weight(k, i) > 0.0) d.offload_bits(k, i) = per_slot;
  }
  return d;
}

}  // namespace

BaselineResult equal_offloading(const SystemConfig& config, const Scenario& scenario,
                                const StreamRng& rng) {
  // the feasible initializer already realizes this baseline's schedule and
  // uniform split; one transmit-power solve prices it
  DecisionSet d = initialize_feasible(config, scenario, rng);
  SolveOutcome theta = solve_block_theta(config, scenario, d);
  if (theta.status == SolveStatus::Infeasible)
    throw InfeasibleInstanceError(theta.blocking_family,
                                  "transmit-power solve failed: " + theta.diagnostic);
  BaselineResult out;
  out.decisions = std::move(theta.decisions);
  out.energy = energy(config, out.decisions);
  return out;
}

BaselineResult channel_inversion(const SystemConfig& config, const Scenario& scenario,
                                 const StreamRng& rng) {
  (void)rng;  // the frozen-gain rule is deterministic
  const int J = scenario.num_aircomp_J;
  const int I = scenario.num_slots_I;
  const double sigma = config.noise_power_sigma0sq;

  DecisionSet d = uniform_schedule_split(config, scenario);

  for (int i = 0; i < I; ++i) {
    double min_h = 0.0;
    for (int j = 0; j < J; ++j) {
      const double a = std::abs(scenario.aircomp_channel(j, i));
      min_h = (j == 0) ? a : std::min(min_h, a);
    }
    for (int j = 0; j < J; ++j) {
      const std::complex<double> h = scenario.aircomp_channel(j, i);
      const std::complex<double> phase =
          config.conjugate_phase ? std::conj(h) / std::abs(h) : h / std::abs(h);
      const double amplitude =
          std::sqrt(config.p_max_aircomp) * min_h / std::sqrt(std::norm(h) + sigma);
      d.aircomp_tx_gain(j, i) = amplitude * phase;
      d.aircomp_power_slack(j, i) = amplitude * amplitude;
    }
    d.rx_gain(i) = (J > 0) ? eta_closed_form(config, scenario, d, i)
                           : std::complex<double>(0.0, 0.0);
    const double mse = mse_analytic(config, scenario, d, i);
    if (mse > config.mse_threshold_zeta * (1.0 + 1e-9)) {
      std::ostringstream msg;
      msg << "slot " << i << ": frozen inversion gains give MSE " << mse
          << " > " << config.mse_threshold_zeta << " for every receive gain";
      throw InfeasibleInstanceError(ConstraintFamily::Mse, msg.str());
    }
  }

  ConstraintFamily family = ConstraintFamily::EdgePower;
  std::string diagnostic;
  if (!frozen_gain_power_update(config, scenario, d, family, diagnostic))
    throw InfeasibleInstanceError(family, diagnostic);

  // offload + schedule refinement with the gains pinned: offload solve,
  // minimum-power pricing, then a guarded rounding pass on the schedule
  double e_prev = energy(config, d).total();
  for (int t = 0; t < config.bcd_max_iters; ++t) {
    SolveOutcome omega = solve_block_omega(config, scenario, d);
    if (omega.status == SolveStatus::Infeasible) break;
    DecisionSet next = std::move(omega.decisions);
    if (!frozen_gain_power_update(config, scenario, next, family, diagnostic)) break;
    d = std::move(next);

    SolveOutcome xi = solve_block_xi(config, scenario, d);
    if (xi.status != SolveStatus::Infeasible) {
      DecisionSet candidate = round_schedule(config, scenario, xi.decisions);
      if (candidate.schedule_weight != d.schedule_weight) {
        SolveOutcome repair = solve_block_omega(config, scenario, candidate);
        if (repair.status != SolveStatus::Infeasible) {
          DecisionSet repaired = std::move(repair.decisions);
          if (frozen_gain_power_update(config, scenario, repaired, family, diagnostic)) {
            const double e_cand = energy(config, repaired).total();
            if (e_cand < energy(config, d).total() * (1.0 - 1e-12) &&
                check_feasibility(config, scenario, repaired, 1e-6).feasible)
              d = std::move(repaired);
          }
        }
      }
    }

    const double e_now = energy(config, d).total();
    if (std::abs(e_prev - e_now) / std::max(std::abs(e_prev), 1e-300) <
        config.bcd_epsilon0)
      break;
    e_prev = e_now;
  }

  const FeasibilityReport report = check_feasibility(config, scenario, d, 1e-6);
  if (!report.feasible)
    throw InfeasibleInstanceError(report.worst_family(),
                                  std::string("frozen-gain refinement violates ") +
                                      constraint_family_name(report.worst_family()));

  BaselineResult out;
  out.decisions = std::move(d);
  out.energy = energy(config, out.decisions);
  return out;
}

}  // namespace hybridcomp
