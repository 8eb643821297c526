#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "hybridcomp/baselines.hpp"
#include "hybridcomp/harness.hpp"

namespace hybridcomp {

MethodRun run_method(const SystemConfig& config, const Scenario& scenario,
                     Method method, const StreamRng& rng) {
  MethodRun out;
  try {
    switch (method) {
      case Method::Bcd: {
        BcdResult r = run_bcd(config, scenario, rng);
        out.decisions = std::move(r.decisions);
        out.trace = std::move(r.trace);
        out.iterations = out.trace.iterations();
        break;
      }
      case Method::EqualOffloading: {
        BaselineResult r = equal_offloading(config, scenario, rng);
        out.decisions = std::move(r.decisions);
        out.iterations = 1;
        break;
      }
      case Method::ChannelInversion: {
        BaselineResult r = channel_inversion(config, scenario, rng);
        out.decisions = std::move(r.decisions);
        out.iterations = 1;
        break;
      }
    }
  } catch (const InfeasibleInstanceError& e) {
    out.feasible = false;
    out.diagnostic = e.what();
    return out;
  }
  out.energy = energy(config, out.decisions);
  out.feasible = check_feasibility(config, scenario, out.decisions, 1e-6).feasible;
  return out;
}

ResultTable run_sweep(const SystemConfig& base, const SweepSpec& spec,
                      const SweepOptions& options) {
  spec.validate();
  base.validate();

  // canonical method order keeps the output independent of the spec file
  std::vector<Method> methods = spec.methods;
  std::sort(methods.begin(), methods.end(), [](Method a, Method b) {
    return static_cast<int>(a) < static_cast<int>(b);
  });
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  struct Cell {
    Method method;
    double value;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (Method m : methods)
    for (double v : spec.values)
      for (std::uint64_t s : spec.seeds) cells.push_back({m, v, s});

  ResultTable table(cells.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      const Cell& cell = cells[idx];
      ResultRow row;
      row.method = method_name(cell.method);
      row.seed = cell.seed;
      row.swept_param = spec.parameter;
      row.swept_value = cell.value;

      const auto t0 = std::chrono::steady_clock::now();
      try {
        const SystemConfig config = apply_swept_value(base, spec.parameter, cell.value);
        const StreamRng rng(cell.seed);
        const Scenario scenario = build_scenario(config, rng);
        MethodRun run = run_method(config, scenario, cell.method, rng);
        row.feasible = run.feasible;
        row.iterations = run.iterations;
        if (run.feasible) {
          row.e_edge_tran_J = run.energy.e_edge_tran;
          row.e_aircomp_tran_J = run.energy.e_aircomp_tran;
          row.e_comp_J = run.energy.e_comp;
          row.e_total_J = run.energy.total();
        }
      } catch (const ConfigError&) {
        row.feasible = false;  // swept value made the instance ill-formed
      }
      if (options.record_timing)
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      table[idx] = std::move(row);
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return table;  // cell enumeration order is already (method, value, seed)
}

namespace {

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

void emit_csv(const ResultTable& table, std::ostream& out) {
  out << "method,seed,swept_param,swept_value,e_edge_tran_J,e_aircomp_tran_J,"
         "e_comp_J,e_total_J,feasible,iterations,wall_ms\n";
  for (const ResultRow& r : table) {
    out << r.method << ',' << r.seed << ',' << r.swept_param << ','
        << format_double("%.9g", r.swept_value) << ','
        << format_double("%.9e", r.e_edge_tran_J) << ','
        << format_double("%.9e", r.e_aircomp_tran_J) << ','
        << format_double("%.9e", r.e_comp_J) << ','
        << format_double("%.9e", r.e_total_J) << ',' << (r.feasible ? 1 : 0)
        << ',' << r.iterations << ',' << format_double("%.3f", r.wall_ms) << '\n';
  }
}

void emit_csv_file(const ResultTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  emit_csv(table, out);
  if (!out) throw IoError("write failed: " + path);
}

ResultTable parse_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv");
  const std::string expected =
      "method,seed,swept_param,swept_value,e_edge_tran_J,e_aircomp_tran_J,"
      "e_comp_J,e_total_J,feasible,iterations,wall_ms";
  if (line != expected) throw IoError("unexpected csv header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 11) throw IoError("bad csv row: " + line);
    ResultRow r;
    r.method = fields[0];
    r.seed = std::stoull(fields[1]);
    r.swept_param = fields[2];
    r.swept_value = std::stod(fields[3]);
    r.e_edge_tran_J = std::stod(fields[4]);
    r.e_aircomp_tran_J = std::stod(fields[5]);
    r.e_comp_J = std::stod(fields[6]);
    r.e_total_J = std::stod(fields[7]);
    r.feasible = fields[8] == "1";
    r.iterations = std::stoi(fields[9]);
    r.wall_ms = std::stod(fields[10]);
    table.push_back(std::move(r));
  }
  return table;
}

ResultTable parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for read: " + path);
  return parse_csv(in);
}

}  // namespace hybridcomp
