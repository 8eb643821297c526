#pragma once

#include <complex>
#include <string>

#include "hybridcomp/kernel.hpp"
#include "hybridcomp/model.hpp"

namespace hybridcomp {

/// Result of one block solve: the full decision set with the block's
/// variables replaced, the total system energy at that point, and solver
/// diagnostics. `blocking_family` is meaningful when status == Infeasible.
struct SolveOutcome {
  DecisionSet decisions;
  double objective = 0.0;  // total energy (J) at the returned point
  SolveStatus status = SolveStatus::Optimal;
  int iterations = 0;
  double kkt_residual = 0.0;
  ConstraintFamily blocking_family = ConstraintFamily::Schedule;
  std::string diagnostic;
};

/// Unique minimizer of the slot MSE as a quadratic in the complex receive
/// gain: conj-weighted aggregation sum over (signal + interference + noise)
/// power. Throws std::domain_error when the denominator is zero.
std::complex<double> eta_closed_form(const SystemConfig& config,
                                     const Scenario& scenario,
                                     const DecisionSet& decisions, int slot);

/// Receive-gain + offload block: sets the per-slot receive gain to its closed
/// form, then minimizes computation energy over the offload schedule subject
/// to demand, capacity, achievable-rate caps and the scheduling coupling.
SolveOutcome solve_block_omega(const SystemConfig& config,
                               const Scenario& scenario,
                               const DecisionSet& decisions);

/// Transmit-scaling + edge-power block: per-slot convex program over real
/// AirComp amplitudes (phases re-aligned against the receive gain), the
/// squared-amplitude slacks, and edge powers, minimizing transmit energy
/// under the power budgets, the MSE budget and the exponential-form rate
/// constraints.
SolveOutcome solve_block_theta(const SystemConfig& config,
                               const Scenario& scenario,
                               const DecisionSet& decisions);

/// Relaxed scheduling block: per-slot simplex program over the scheduling
/// weights (offloads and powers fixed), minimizing edge transmit +
/// computation energy under the MSE and capacity constraints. Returns
/// relaxed weights; pair with round_schedule to recover a binary schedule.
SolveOutcome solve_block_xi(const SystemConfig& config, const Scenario& scenario,
                            const DecisionSet& decisions);

/// Max-value rounding: per slot the largest weight wins (lowest index on
/// ties), losers get weight zero and their offloaded bits cleared.
DecisionSet round_schedule(const SystemConfig& config, const Scenario& scenario,
                           const DecisionSet& relaxed);

}  // namespace hybridcomp
