#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hybridcomp/bcd.hpp"
#include "hybridcomp/model.hpp"

namespace hybridcomp {

enum class Method { Bcd, EqualOffloading, ChannelInversion };
const char* method_name(Method m);
Method parse_method(const std::string& name);  // throws ConfigError

/// "paper" (Table scale) or "desk" (CI scale); throws ConfigError otherwise.
SystemConfig preset_by_name(const std::string& name);

/// key = value text mirroring the SystemConfig field names; keys overlay the
/// given base, unknown keys are rejected.
SystemConfig load_config(std::istream& in, SystemConfig base);
SystemConfig load_config_file(const std::string& path, SystemConfig base);
void save_config_file(const SystemConfig& config, const std::string& path);

struct MethodRun {
  DecisionSet decisions;
  EnergyBreakdown energy;
  bool feasible = false;
  int iterations = 0;
  std::string diagnostic;          // set when infeasible
  IterationTrace trace;            // populated for the descent method
};

/// One scenario, one method. Infeasible instances come back as a result with
/// feasible = false rather than an exception.
MethodRun run_method(const SystemConfig& config, const Scenario& scenario,
                     Method method, const StreamRng& rng);

/// Trend-study request: one swept parameter, the methods to run, and the
/// seeds reused across values for paired comparisons. An edge-UE-count sweep
/// keeps J + K constant.
struct SweepSpec {
  std::string parameter;  // mse_threshold_zeta | p_max_edge | num_edge_K |
                          // horizon_T | data_demand_Dk
  std::vector<double> values;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;

  void validate() const;  // throws ConfigError
};

SweepSpec load_sweep_spec(std::istream& in);
SweepSpec load_sweep_spec_file(const std::string& path);

/// Applies one swept value to a copy of the base config (J + K held constant
/// for edge-count sweeps).
SystemConfig apply_swept_value(const SystemConfig& base, const std::string& parameter,
                               double value);

struct ResultRow {
  std::string method;
  std::uint64_t seed = 0;
  std::string swept_param;
  double swept_value = 0.0;
  double e_edge_tran_J = 0.0;
  double e_aircomp_tran_J = 0.0;
  double e_comp_J = 0.0;
  double e_total_J = 0.0;
  bool feasible = false;
  int iterations = 0;
  double wall_ms = 0.0;
};
using ResultTable = std::vector<ResultRow>;

struct SweepOptions {
  int jobs = 1;
  bool record_timing = true;  // off: wall_ms = 0 for byte-reproducible output
};

/// Runs every (method, value, seed) cell on a bounded worker pool; rows come
/// back sorted by (method, value, seed) regardless of completion order.
/// Infeasible cells are recorded with feasible = 0 and the sweep continues.
ResultTable run_sweep(const SystemConfig& base, const SweepSpec& spec,
                      const SweepOptions& options = {});

/// Columns (exactly): method, seed, swept_param, swept_value, e_edge_tran_J,
/// e_aircomp_tran_J, e_comp_J, e_total_J, feasible, iterations, wall_ms.
void emit_csv(const ResultTable& table, std::ostream& out);
void emit_csv_file(const ResultTable& table, const std::string& path);
ResultTable parse_csv(std::istream& in);
ResultTable parse_csv_file(const std::string& path);

enum class PlotKind {
  MseThreshold,   // energy vs distortion budget
  EdgePowerBudget,
  EdgeUeCount,
  Horizon,
  DataDemand,
};
PlotKind parse_plot_kind(const std::string& name);  // throws ConfigError
const char* plot_kind_name(PlotKind kind);
/// Swept-parameter key the kind plots over.
const char* plot_kind_parameter(PlotKind kind);

/// Writes <name>.svg (self-contained vector figure: per-method mean line
/// plus per-seed scatter), <name>.csv (the rows behind it) and <name>.py
/// (script regenerating the figure from the csv). Returns the basename used.
std::string emit_plot(const ResultTable& table, PlotKind kind,
                      const std::string& out_dir);

}  // namespace hybridcomp
