#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hybridcomp/errors.hpp"
#include "hybridcomp/rng.hpp"

namespace hybridcomp {

/// All physical and algorithmic parameters of one simulation instance.
/// Everything is SI internally: watts, joules, hertz, seconds, bits, meters.
/// Logarithmic figures (reference path gain -60 dB, noise power -120 dBm)
/// are converted once, at preset definition or config load.
struct SystemConfig {
  double horizon_T = 200.0;           // s, total operation horizon
  int num_slots_I = 200;              // slot count
  double bandwidth_B = 5e6;           // Hz
  double data_demand_Dk = 6e6;        // bits to offload per edge UE
  double cycles_per_bit_c0 = 1e3;     // CPU cycles per offloaded bit
  double max_cpu_f = 6e9;             // cycles/s, BS processing capacity
  double capacitance_gamma = 1e-27;   // J*s^2/cycles^3, CPU energy coefficient
  double noise_power_sigma0sq = 1e-15;  // W (-120 dBm)
  double rician_kappa = 15.0;         // LoS-to-scatter power ratio
  double pathloss_ref_beta0 = 1e-6;   // power gain at 1 m (-60 dB)
  double p_max_edge = 1.0;            // W, per edge UE
  double p_max_aircomp = 1.0;         // W, bound on |tx gain|^2 per AirComp UE
  double mse_threshold_zeta = 0.5;    // aggregation distortion budget
  double area_side = 1000.0;          // m, deployment square
  int num_aircomp_J = 10;
  int num_edge_K = 10;
  double bcd_epsilon0 = 1e-3;         // relative energy-improvement stop rule
  int bcd_max_iters = 50;
  double solver_feas_tol = 1e-8;      // normalized constraint residual
  double solver_opt_tol = 1e-6;       // projected-gradient/KKT residual
  std::uint64_t rng_seed = 1;
  bool conjugate_phase = false;       // channel-inversion baseline phase rule

  double slot_duration() const { return horizon_T / num_slots_I; }
  /// Largest per-slot offload the BS can process: (T/I) * f_max / c0 bits.
  double max_bits_per_slot() const {
    return slot_duration() * max_cpu_f / cycles_per_bit_c0;
  }
  int num_ues() const { return num_aircomp_J + num_edge_K; }

  /// Throws ConfigError on the first violated invariant.
  void validate() const;
};

/// Table-I scale instance (slow; 3.5-power subproblem sizes).
SystemConfig paper_preset();
/// Small instance for tests and quick sweeps: I=20, J=K=5, 0.6 Mbit demand.
SystemConfig desk_preset();

enum class UeRole { Aircomp, Edge };

/// Node placement plus the per-slot complex channel gain of every UE.
/// UEs are indexed 0..J+K-1 with AirComp roles first.
struct Scenario {
  Eigen::Vector2d bs_position;
  std::vector<Eigen::Vector2d> ue_positions;
  std::vector<UeRole> ue_role;
  Eigen::MatrixXcd channels;  // (J+K) x I

  int num_aircomp_J = 0;
  int num_edge_K = 0;
  int num_slots_I = 0;

  int num_ues() const { return num_aircomp_J + num_edge_K; }
  /// Global UE index of AirComp UE j (0-based).
  int aircomp_index(int j) const { return j; }
  /// Global UE index of edge UE k (0-based).
  int edge_index(int k) const { return num_aircomp_J + k; }

  std::complex<double> aircomp_channel(int j, int i) const {
    return channels(aircomp_index(j), i);
  }
  std::complex<double> edge_channel(int k, int i) const {
    return channels(edge_index(k), i);
  }

  double distance(int ue) const {
    return (ue_positions[static_cast<std::size_t>(ue)] - bs_position).norm();
  }
};

/// Uniform i.i.d. UE drop over the square with the BS at its center; roles
/// assigned first-J AirComp, remaining-K Edge. Channels left empty.
Scenario generate_placement(const SystemConfig& config, const StreamRng& rng);

/// One Rician draw at distance d: sqrt(beta0/d^2) * (LoS + scatter), with a
/// deterministic unit LoS component and a unit-variance circularly-symmetric
/// complex Gaussian scatter term. Throws std::domain_error for d <= 0.
std::complex<double> rician_channel(double d, const SystemConfig& config,
                                    SplitMix64& rng);

/// Placement plus independent per-(UE, slot) channel draws.
Scenario build_scenario(const SystemConfig& config, const StreamRng& rng);

/// Plain-text fixture format (positions, roles, channels as re/im pairs).
void export_scenario(const Scenario& scenario, std::ostream& out);
void export_scenario_file(const Scenario& scenario, const std::string& path);
Scenario import_scenario(std::istream& in);
Scenario import_scenario_file(const std::string& path);

}  // namespace hybridcomp
