#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hybridcomp/model.hpp"
#include "hybridcomp/subsolvers.hpp"

namespace hybridcomp {

enum class TerminationReason { Converged, MaxIterations, Infeasible };
const char* termination_reason_name(TerminationReason r);

struct BlockSummary {
  SolveStatus status = SolveStatus::Optimal;
  int iterations = 0;
  double kkt_residual = 0.0;
};

struct IterationRecord {
  int iteration = 0;  // 1-based
  EnergyBreakdown energy;
  BlockSummary omega, theta, xi;
  FeasibilityReport feasibility;
  bool schedule_changed = false;  // rounding proposed a different schedule
  bool schedule_accepted = false; // ... and the repaired point won
  double wall_ms = 0.0;
};

struct IterationTrace {
  double initial_energy = 0.0;
  std::vector<IterationRecord> records;
  TerminationReason reason = TerminationReason::MaxIterations;
  std::string diagnostic;
  double total_wall_ms = 0.0;

  int iterations() const { return static_cast<int>(records.size()); }
};

/// Line-delimited structured records, one JSON object per iteration plus a
/// trailing summary record.
void write_trace_jsonl(const IterationTrace& trace, std::ostream& out);
void write_trace_jsonl_file(const IterationTrace& trace, const std::string& path);

/// Constructs a feasible starting point: round-robin schedule, equal demand
/// split over each UE's slots, randomized channel-inversion transmit
/// amplitudes rescaled until the MSE budget holds, and minimum edge powers
/// meeting the rate constraints with equality. Throws
/// InfeasibleInstanceError naming the binding family when construction fails.
DecisionSet initialize_feasible(const SystemConfig& config,
                                const Scenario& scenario, const StreamRng& rng);

struct BcdResult {
  DecisionSet decisions;
  IterationTrace trace;
};

/// Full block-coordinate descent: cyclic receive-gain/offload,
/// transmit-power, and scheduling solves with max-value rounding. A proposed
/// schedule change is accepted only after an offload + power repair pass
/// keeps the point feasible and strictly lowers total energy, so the traced
/// energy sequence is non-increasing at every (binary-schedule) iterate.
/// Stops when the relative energy improvement drops below bcd_epsilon0.
BcdResult run_bcd(const SystemConfig& config, const Scenario& scenario,
                  const StreamRng& rng);

/// Interior-point-style operation counts per block and per iteration,
/// 3.5-power in the subproblem variable counts.
struct ComplexityEstimate {
  double omega_ops = 0.0;  // (I*(1+K))^3.5
  double theta_ops = 0.0;  // (I*(2J+K))^3.5
  double xi_ops = 0.0;     // (I*K)^3.5
  double per_iteration() const { return omega_ops + theta_ops + xi_ops; }
  double total_for(int m_iterations) const {
    return static_cast<double>(m_iterations) * per_iteration();
  }
};

ComplexityEstimate complexity_estimate(const SystemConfig& config);

}  // namespace hybridcomp
