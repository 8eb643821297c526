// Command-line front end: single runs, trend sweeps, trace inspection and
// quick statistical self-checks over the simulation library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hybridcomp/baselines.hpp"
#include "hybridcomp/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hybridcomp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitBadConfig = 3;
constexpr int kExitIo = 4;

SystemConfig resolve_config(const std::string& preset, const std::string& config_path,
                            std::uint64_t seed, bool seed_given) {
  SystemConfig config = preset_by_name(preset);
  if (!config_path.empty()) config = load_config_file(config_path, config);
  if (seed_given) config.rng_seed = seed;
  config.validate();
  return config;
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
}

int cmd_simulate(const std::string& preset, const std::string& config_path,
                 std::uint64_t seed, bool seed_given, const std::string& method_name_,
                 const std::string& out_dir) {
  const SystemConfig config = resolve_config(preset, config_path, seed, seed_given);
  const Method method = parse_method(method_name_);
  const StreamRng rng(config.rng_seed);
  const Scenario scenario = build_scenario(config, rng);

  MethodRun run = run_method(config, scenario, method, rng);

  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    export_scenario_file(scenario, out_dir + "/scenario.txt");
    if (run.feasible)
      export_decisions_file(run.decisions, out_dir + "/decisions.txt");
    if (method == Method::Bcd)
      write_trace_jsonl_file(run.trace, out_dir + "/trace.jsonl");
  }

  if (!run.feasible) {
    std::cerr << "infeasible instance: " << run.diagnostic << "\n";
    return kExitInfeasible;
  }

  std::printf("method          %s\n", method_name(method));
  std::printf("seed            %llu\n", static_cast<unsigned long long>(config.rng_seed));
  std::printf("iterations      %d\n", run.iterations);
  std::printf("e_edge_tran_J   %.9e\n", run.energy.e_edge_tran);
  std::printf("e_aircomp_tran_J %.9e\n", run.energy.e_aircomp_tran);
  std::printf("e_comp_J        %.9e\n", run.energy.e_comp);
  std::printf("e_total_J       %.9e\n", run.energy.total());
  const ComplexityEstimate est = complexity_estimate(config);
  std::printf("op_count_per_iteration %.6e (total for %d iterations: %.6e)\n",
              est.per_iteration(), run.iterations,
              est.total_for(std::max(1, run.iterations)));
  return kExitOk;
}

int cmd_sweep(const std::string& preset, const std::string& config_path,
              const std::string& spec_path, const std::string& out_dir, int jobs,
              bool no_timing) {
  const SystemConfig base = resolve_config(preset, config_path, 0, false);
  const SweepSpec spec = load_sweep_spec_file(spec_path);
  SweepOptions options;
  options.jobs = jobs;
  options.record_timing = !no_timing;

  ResultTable table = run_sweep(base, spec, options);

  ensure_out_dir(out_dir);
  emit_csv_file(table, out_dir + "/results.csv");
  for (PlotKind kind :
       {PlotKind::MseThreshold, PlotKind::EdgePowerBudget, PlotKind::EdgeUeCount,
        PlotKind::Horizon, PlotKind::DataDemand}) {
    if (spec.parameter != plot_kind_parameter(kind)) continue;
    const std::string base_name = emit_plot(table, kind, out_dir);
    std::printf("wrote %s/%s.{svg,csv,py}\n", out_dir.c_str(), base_name.c_str());
  }
  std::printf("wrote %s/results.csv (%zu rows)\n", out_dir.c_str(), table.size());

  std::size_t infeasible = 0;
  for (const auto& row : table)
    if (!row.feasible) ++infeasible;
  if (infeasible > 0)
    std::printf("%zu of %zu cells infeasible\n", infeasible, table.size());
  return kExitOk;
}

int cmd_inspect(const std::string& trace_path) {
  std::ifstream in(trace_path);
  if (!in) throw IoError("cannot open trace: " + trace_path);
  std::string line;
  std::printf("%4s  %14s %14s %14s %14s  %8s %6s\n", "iter", "e_edge", "e_air",
              "e_comp", "e_total", "feasible", "sched");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json row = json::parse(line);
    if (row.value("summary", false)) {
      std::printf("-- %d iterations, termination: %s, initial energy %.6e J\n",
                  row.value("iterations", 0),
                  row.value("termination", std::string("?")).c_str(),
                  row.value("initial_energy_J", 0.0));
      if (!row.value("diagnostic", std::string()).empty())
        std::printf("-- diagnostic: %s\n", row["diagnostic"].get<std::string>().c_str());
      continue;
    }
    std::printf("%4d  %14.6e %14.6e %14.6e %14.6e  %8s %6s\n",
                row.value("iteration", 0), row.value("e_edge_tran_J", 0.0),
                row.value("e_aircomp_tran_J", 0.0), row.value("e_comp_J", 0.0),
                row.value("e_total_J", 0.0),
                row["feasibility"].value("feasible", false) ? "yes" : "NO",
                row.value("schedule_accepted", false)
                    ? "moved"
                    : (row.value("schedule_changed", false) ? "held" : "-"));
  }
  return kExitOk;
}

// quick statistical self-checks of the channel model and MSE machinery
int cmd_oracle(const std::string& preset, std::uint64_t seed, bool seed_given) {
  SystemConfig config = preset_by_name(preset);
  if (seed_given) config.rng_seed = seed;
  const StreamRng rng(config.rng_seed);
  bool all_ok = true;

  {
    // channel second moment against the pathloss law
    const double d = 500.0;
    SplitMix64 g = rng.stream(rng_purpose::kOracle, 1);
    const std::int64_t n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (std::int64_t t = 0; t < n; ++t) {
      const double p = std::norm(rician_channel(d, config, g));
      sum += p;
      sum2 += p * p;
    }
    const double mean = sum / static_cast<double>(n);
    const double expected = config.pathloss_ref_beta0 / (d * d);
    const double stderr_ =
        std::sqrt((sum2 / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
    const bool ok = std::abs(mean - expected) <= 4.0 * stderr_;
    all_ok = all_ok && ok;
    std::printf("[%s] channel power mean %.4e vs %.4e (4-sigma band %.1e)\n",
                ok ? "PASS" : "FAIL", mean, expected, 4.0 * stderr_);
  }

  {
    // Monte-Carlo MSE against the closed form on a small random slot
    SystemConfig c = config;
    c.num_aircomp_J = 3;
    c.num_edge_K = 2;
    c.num_slots_I = 1;
    const Scenario scenario = build_scenario(c, rng);
    DecisionSet d = DecisionSet::zeros(2, 3, 1);
    SplitMix64 g = rng.stream(rng_purpose::kOracle, 2);
    for (int j = 0; j < 3; ++j)
      d.aircomp_tx_gain(j, 0) =
          std::complex<double>(g.uniform(-1, 1), g.uniform(-1, 1)) /
          std::abs(scenario.aircomp_channel(j, 0)) * 1e-1;
    d.schedule_weight(0, 0) = 1.0;
    d.edge_tx_power(0, 0) = 0.3;
    d.rx_gain(0) = eta_closed_form(c, scenario, d, 0);
    const double analytic = mse_analytic(c, scenario, d, 0);
    const double mc = mse_monte_carlo(c, scenario, d, 0, 400000, g);
    const bool ok = std::abs(mc - analytic) <= 0.02 * std::max(analytic, 1e-12);
    all_ok = all_ok && ok;
    std::printf("[%s] monte-carlo MSE %.6e vs analytic %.6e\n", ok ? "PASS" : "FAIL",
                mc, analytic);
  }

  {
    // closed-form receive gain against a coarse complex grid
    SystemConfig c = config;
    c.num_aircomp_J = 2;
    c.num_edge_K = 1;
    c.num_slots_I = 1;
    const Scenario scenario = build_scenario(c, rng);
    DecisionSet d = DecisionSet::zeros(1, 2, 1);
    d.aircomp_tx_gain(0, 0) = 0.4 / std::abs(scenario.aircomp_channel(0, 0));
    d.aircomp_tx_gain(1, 0) = 0.6 / std::abs(scenario.aircomp_channel(1, 0));
    d.schedule_weight(0, 0) = 1.0;
    d.edge_tx_power(0, 0) = 0.1;
    d.rx_gain(0) = eta_closed_form(c, scenario, d, 0);
    const double best = mse_analytic(c, scenario, d, 0);
    double grid_best = 1e300;
    const double span = 2.0 * std::abs(d.rx_gain(0));
    for (int a = 0; a <= 100; ++a)
      for (int b = 0; b <= 100; ++b) {
        DecisionSet t = d;
        t.rx_gain(0) = std::complex<double>(-span + 2 * span * a / 100.0,
                                            -span + 2 * span * b / 100.0);
        grid_best = std::min(grid_best, mse_analytic(c, scenario, t, 0));
      }
    const bool ok = best <= grid_best + 1e-12;
    all_ok = all_ok && ok;
    std::printf("[%s] closed-form receive gain MSE %.6e <= grid best %.6e\n",
                ok ? "PASS" : "FAIL", best, grid_best);
  }

  return all_ok ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid AirComp + edge-offloading energy optimization"};
  app.require_subcommand(1);

  std::string preset = "desk";
  std::string config_path;
  std::string method = "bcd";
  std::string out_dir;
  std::string spec_path;
  std::string trace_path;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool no_timing = false;

  auto* simulate = app.add_subcommand("simulate", "run one scenario with one method");
  simulate->add_option("--preset", preset, "paper|desk")->capture_default_str();
  simulate->add_option("--config", config_path, "key = value config overlay file");
  auto* sim_seed = simulate->add_option("--seed", seed, "rng seed");
  simulate->add_option("--method", method, "bcd|equal|inversion")->capture_default_str();
  simulate->add_option("--out", out_dir, "output directory for scenario/trace dumps");

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep from a spec file");
  sweep->add_option("--preset", preset, "paper|desk")->capture_default_str();
  sweep->add_option("--config", config_path, "key = value config overlay file");
  sweep->add_option("spec", spec_path, "sweep spec file")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--jobs", jobs, "worker pool size")->capture_default_str();
  sweep->add_flag("--no-timing", no_timing,
                  "write wall_ms as 0 for byte-reproducible csv output");

  auto* inspect = app.add_subcommand("inspect", "pretty-print a trace file");
  inspect->add_option("trace", trace_path, "trace.jsonl path")->required();

  auto* oracle = app.add_subcommand("oracle", "run quick statistical self-checks");
  oracle->add_option("--preset", preset, "paper|desk")->capture_default_str();
  auto* oracle_seed = oracle->add_option("--seed", seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return cmd_simulate(preset, config_path, seed, !sim_seed->empty(), method,
                          out_dir);
    if (sweep->parsed())
      return cmd_sweep(preset, config_path, spec_path, out_dir, jobs, no_timing);
    if (inspect->parsed()) return cmd_inspect(trace_path);
    if (oracle->parsed()) return cmd_oracle(preset, seed, !oracle_seed->empty());
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const InfeasibleInstanceError& e) {
    std::cerr << "infeasible instance (" << constraint_family_name(e.family())
              << "): " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
