#pragma once

#include <complex>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "hybridcomp/rng.hpp"
#include "hybridcomp/scenario.hpp"

namespace hybridcomp {

/// Full variable block of the joint problem. Shapes: K x I for the edge-UE
/// quantities, J x I for the AirComp transmit gains, I for the receive gain.
/// `schedule_binary` marks whether schedule_weight currently holds an exact
/// one-hot column per slot or a relaxed point on the simplex.
struct DecisionSet {
  int num_edge_K = 0;
  int num_aircomp_J = 0;
  int num_slots_I = 0;
  bool schedule_binary = true;

  Eigen::MatrixXd schedule_weight;     // alpha, K x I
  Eigen::MatrixXd offload_bits;        // l, K x I
  Eigen::MatrixXd edge_tx_power;       // p (W), K x I
  Eigen::MatrixXcd aircomp_tx_gain;    // b, J x I
  Eigen::VectorXcd rx_gain;            // eta, I
  Eigen::MatrixXd aircomp_power_slack; // psi >= |b|^2, J x I

  static DecisionSet zeros(int K, int J, int I);

  /// Index of the scheduled edge UE in slot i (largest weight; binary
  /// schedules give the one-hot index). -1 when K == 0.
  int scheduled_ue(int i) const;

  bool same_shape(const DecisionSet& other) const;
};

void export_decisions(const DecisionSet& d, std::ostream& out);
void export_decisions_file(const DecisionSet& d, const std::string& path);
DecisionSet import_decisions(std::istream& in);
DecisionSet import_decisions_file(const std::string& path);

struct EnergyBreakdown {
  double e_edge_tran = 0.0;     // J, edge offload transmissions
  double e_aircomp_tran = 0.0;  // J, AirComp transmissions
  double e_comp = 0.0;          // J, BS computation
  double total() const { return e_edge_tran + e_aircomp_tran + e_comp; }
};

/// Worst normalized violation per constraint family. Normalizers: power
/// budgets for the power families, zeta for MSE, D_k for data and rate,
/// (T/I)*f_max for capacity, the per-slot bit capacity for the coupling;
/// schedule residuals are exact (unnormalized).
struct FeasibilityReport {
  double schedule = 0.0;
  double edge_power = 0.0;
  double aircomp_power = 0.0;
  double mse = 0.0;
  double data = 0.0;
  double capacity = 0.0;
  double rate = 0.0;
  double coupling = 0.0;
  bool feasible = false;

  double worst() const;
  ConstraintFamily worst_family() const;
};

/// Slot-i aggregation distortion:
///   sum_j |eta*b_j*h_j - 1|^2 + |eta|^2*sigma0^2
///   + sum_k |eta|^2 * alpha_k^2 * p_k * |h_k|^2.
double mse_analytic(const SystemConfig& config, const Scenario& scenario,
                    const DecisionSet& decisions, int slot);

enum class SignalModel { ComplexGaussian, BinaryReal };

/// Empirical E{|eta*y - sum_j s_j|^2} over fresh unit-variance signal and
/// noise draws. Test oracle only; solvers never call it.
double mse_monte_carlo(const SystemConfig& config, const Scenario& scenario,
                       const DecisionSet& decisions, int slot,
                       std::int64_t samples, SplitMix64& rng,
                       SignalModel signal_model = SignalModel::ComplexGaussian);

/// Three-term energy of a decision set (schedule-weighted edge transmit,
/// AirComp transmit, cubic BS computation).
EnergyBreakdown energy(const SystemConfig& config, const DecisionSet& decisions);

/// Per-slot achievable offload for edge UE k: (T/I)*B*log2(1 + SINR) with the
/// AirComp transmissions counted as interference.
double rate_capacity_bits(const SystemConfig& config, const Scenario& scenario,
                          const DecisionSet& decisions, int k, int i);

/// Evaluates every constraint family at the given normalized tolerance.
/// Throws std::invalid_argument on shape mismatch between the inputs.
FeasibilityReport check_feasibility(const SystemConfig& config,
                                    const Scenario& scenario,
                                    const DecisionSet& decisions, double tol);

}  // namespace hybridcomp
