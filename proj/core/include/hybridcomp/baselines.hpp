#pragma once

#include "hybridcomp/model.hpp"

namespace hybridcomp {

struct BaselineResult {
  DecisionSet decisions;
  EnergyBreakdown energy;
};

/// Equal-offloading baseline: round-robin schedule with each UE's demand
/// split uniformly over its slots, receive gain from the closed form, and a
/// single transmit-power solve. No descent iterations over offloads or the
/// schedule. Throws InfeasibleInstanceError when the uniform split cannot be
/// carried.
BaselineResult equal_offloading(const SystemConfig& config,
                                const Scenario& scenario, const StreamRng& rng);

/// Channel-inversion baseline: AirComp gains frozen at
/// sqrt(P_max) * min_l|h_l| / sqrt(|h_j|^2 + sigma^2) * h_j/|h_j|
/// (conjugated phase instead when config.conjugate_phase is set); offloads,
/// schedule and edge powers are then optimized with the gains held fixed.
/// Throws InfeasibleInstanceError when the frozen gains violate the MSE
/// budget for every receive gain.
BaselineResult channel_inversion(const SystemConfig& config,
                                 const Scenario& scenario, const StreamRng& rng);

}  // namespace hybridcomp
