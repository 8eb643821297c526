#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "hybridcomp/harness.hpp"

namespace hybridcomp {

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "mse_threshold") return PlotKind::MseThreshold;
  if (name == "edge_power_budget") return PlotKind::EdgePowerBudget;
  if (name == "edge_ue_count") return PlotKind::EdgeUeCount;
  if (name == "horizon") return PlotKind::Horizon;
  if (name == "data_demand") return PlotKind::DataDemand;
  throw ConfigError("unknown plot kind: " + name +
                    " (expected mse_threshold|edge_power_budget|edge_ue_count|"
                    "horizon|data_demand)");
}

const char* plot_kind_name(PlotKind kind) {
  switch (kind) {
    case PlotKind::MseThreshold: return "mse_threshold";
    case PlotKind::EdgePowerBudget: return "edge_power_budget";
    case PlotKind::EdgeUeCount: return "edge_ue_count";
    case PlotKind::Horizon: return "horizon";
    case PlotKind::DataDemand: return "data_demand";
  }
  return "unknown";
}

const char* plot_kind_parameter(PlotKind kind) {
  switch (kind) {
    case PlotKind::MseThreshold: return "mse_threshold_zeta";
    case PlotKind::EdgePowerBudget: return "p_max_edge";
    case PlotKind::EdgeUeCount: return "num_edge_K";
    case PlotKind::Horizon: return "horizon_T";
    case PlotKind::DataDemand: return "data_demand_Dk";
  }
  return "unknown";
}

namespace {

const char* x_axis_label(PlotKind kind) {
  switch (kind) {
    case PlotKind::MseThreshold: return "mse_threshold_zeta [1]";
    case PlotKind::EdgePowerBudget: return "p_max_edge [W]";
    case PlotKind::EdgeUeCount: return "num_edge_K [count]";
    case PlotKind::Horizon: return "horizon_T [s]";
    case PlotKind::DataDemand: return "data_demand_Dk [bit]";
  }
  return "";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fpix(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* series_color(std::size_t index) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#9467bd", "#ff7f0e", "#8c564b"};
  return colors[index % 6];
}

struct Series {
  std::string method;
  std::vector<double> xs;                    // sorted swept values
  std::vector<double> means;                 // mean total energy per value
  std::vector<std::pair<double, double>> scatter;  // (value, seed energy)
};

}  // namespace

std::string emit_plot(const ResultTable& table, PlotKind kind,
                      const std::string& out_dir) {
  const std::string parameter = plot_kind_parameter(kind);
  ResultTable rows;
  for (const ResultRow& r : table)
    if (r.swept_param == parameter) rows.push_back(r);
  if (rows.empty())
    throw ConfigError(std::string("no rows for swept parameter ") + parameter);

  // per-method per-value means over feasible seeds
  std::map<std::string, std::map<double, std::vector<double>>> grouped;
  for (const ResultRow& r : rows)
    if (r.feasible) grouped[r.method][r.swept_value].push_back(r.e_total_J);

  std::vector<Series> series;
  for (const auto& [method, by_value] : grouped) {
    Series s;
    s.method = method;
    for (const auto& [value, energies] : by_value) {
      double sum = 0.0;
      for (double e : energies) {
        sum += e;
        s.scatter.emplace_back(value, e);
      }
      s.xs.push_back(value);
      s.means.push_back(sum / static_cast<double>(energies.size()));
    }
    series.push_back(std::move(s));
  }
  if (series.empty()) throw ConfigError("no feasible rows to plot");

  double x_min = series[0].xs.front(), x_max = x_min;
  double y_min = series[0].means.front(), y_max = y_min;
  for (const Series& s : series) {
    for (double x : s.xs) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
    }
    for (const auto& [x, y] : s.scatter) {
      (void)x;
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + std::max(1e-12, std::abs(y_min));
  const double y_pad = 0.06 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double W = 720, H = 480, ml = 90, mr = 30, mt = 30, mb = 70;
  auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y_min) / (y_max - y_min) * (H - mt - mb); };

  const std::string base = std::string("plot_") + plot_kind_name(kind);
  const std::string svg_path = out_dir + "/" + base + ".svg";
  const std::string csv_path = out_dir + "/" + base + ".csv";
  const std::string py_path = out_dir + "/" + base + ".py";

  emit_csv_file(rows, csv_path);

  std::ofstream svg(svg_path);
  if (!svg) throw IoError("cannot open for write: " + svg_path);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " "
      << H << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  // axes
  svg << "<line x1=\"" << fpix(ml) << "\" y1=\"" << fpix(H - mb) << "\" x2=\""
      << fpix(W - mr) << "\" y2=\"" << fpix(H - mb)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << fpix(ml) << "\" y1=\"" << fpix(mt) << "\" x2=\""
      << fpix(ml) << "\" y2=\"" << fpix(H - mb)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double fx = x_min + (x_max - x_min) * t / 5.0;
    const double fy = y_min + (y_max - y_min) * t / 5.0;
    svg << "<line x1=\"" << fpix(px(fx)) << "\" y1=\"" << fpix(H - mb)
        << "\" x2=\"" << fpix(px(fx)) << "\" y2=\"" << fpix(H - mb + 5)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fpix(px(fx)) << "\" y=\"" << fpix(H - mb + 20)
        << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
    svg << "<line x1=\"" << fpix(ml - 5) << "\" y1=\"" << fpix(py(fy))
        << "\" x2=\"" << fpix(ml) << "\" y2=\"" << fpix(py(fy))
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fpix(ml - 8) << "\" y=\"" << fpix(py(fy) + 4)
        << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
  }
  svg << "<text x=\"" << fpix(ml + (W - ml - mr) / 2) << "\" y=\"" << fpix(H - 15)
      << "\" text-anchor=\"middle\">" << x_axis_label(kind) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << fpix(mt + (H - mt - mb) / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << fpix(mt + (H - mt - mb) / 2) << ")\">e_total_J [J]</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = series_color(si);
    for (const auto& [x, y] : s.scatter)
      svg << "<circle class=\"scatter\" cx=\"" << fpix(px(x)) << "\" cy=\""
          << fpix(py(y)) << "\" r=\"3\" fill=\"" << color
          << "\" fill-opacity=\"0.35\"/>\n";
    svg << "<polyline class=\"series\" data-method=\"" << s.method
        << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (i) svg << ' ';
      svg << fpix(px(s.xs[i])) << ',' << fpix(py(s.means[i]));
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << fpix(W - mr - 150) << "\" y=\""
        << fpix(mt + 20 + 18 * static_cast<double>(si)) << "\" fill=\"" << color
        << "\">" << s.method << "</text>\n";
  }
  svg << "</svg>\n";
  if (!svg) throw IoError("write failed: " + svg_path);
  svg.close();

  std::ofstream script(py_path);
  if (!script) throw IoError("cannot open for write: " + py_path);
  script << "#!/usr/bin/env python3\n"
     << "# Regenerates " << base << " from " << base << ".csv\n"
     << "import csv\n"
     << "from collections import defaultdict\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "rows = list(csv.DictReader(open('" << base << ".csv')))\n"
     << "rows = [r for r in rows if r['feasible'] == '1']\n"
     << "fig, ax = plt.subplots(figsize=(7.2, 4.8))\n"
     << "for method in sorted({r['method'] for r in rows}):\n"
     << "    by_value = defaultdict(list)\n"
     << "    for r in rows:\n"
     << "        if r['method'] == method:\n"
     << "            by_value[float(r['swept_value'])].append(float(r['e_total_J']))\n"
     << "    xs = sorted(by_value)\n"
     << "    means = [sum(by_value[x]) / len(by_value[x]) for x in xs]\n"
     << "    for x in xs:\n"
     << "        ax.scatter([x] * len(by_value[x]), by_value[x], s=12, alpha=0.35)\n"
     << "    ax.plot(xs, means, marker='o', label=method)\n"
     << "ax.set_xlabel('" << x_axis_label(kind) << "')\n"
     << "ax.set_ylabel('e_total_J [J]')\n"
     << "ax.legend()\n"
     << "fig.tight_layout()\n"
     << "fig.savefig('" << base << ".png', dpi=150)\n";
  if (!script) throw IoError("write failed: " + py_path);
  return base;
}

}  // namespace hybridcomp
