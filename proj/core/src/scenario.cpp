#include "hybridcomp/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hybridcomp {

const char* constraint_family_name(ConstraintFamily f) {
  switch (f) {
    case ConstraintFamily::Schedule: return "schedule";
    case ConstraintFamily::EdgePower: return "edge_power";
    case ConstraintFamily::AircompPower: return "aircomp_power";
    case ConstraintFamily::Mse: return "mse";
    case ConstraintFamily::Data: return "data";
    case ConstraintFamily::Capacity: return "capacity";
    case ConstraintFamily::Rate: return "rate";
    case ConstraintFamily::Coupling: return "coupling";
  }
  return "unknown";
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

void SystemConfig::validate() const {
  require(horizon_T > 0.0, "horizon_T must be > 0");
  require(num_slots_I >= 1, "num_slots_I must be >= 1");
  require(bandwidth_B > 0.0, "bandwidth_B must be > 0");
  require(data_demand_Dk > 0.0, "data_demand_Dk must be > 0");
  require(cycles_per_bit_c0 > 0.0, "cycles_per_bit_c0 must be > 0");
  require(max_cpu_f > 0.0, "max_cpu_f must be > 0");
  require(capacitance_gamma > 0.0, "capacitance_gamma must be > 0");
  require(noise_power_sigma0sq > 0.0, "noise_power_sigma0sq must be > 0");
  require(rician_kappa > 0.0, "rician_kappa must be > 0");
  require(pathloss_ref_beta0 > 0.0, "pathloss_ref_beta0 must be > 0");
  require(p_max_edge > 0.0, "p_max_edge must be > 0");
  require(p_max_aircomp > 0.0, "p_max_aircomp must be > 0");
  require(mse_threshold_zeta > 0.0, "mse_threshold_zeta must be > 0");
  require(area_side > 0.0, "area_side must be > 0");
  require(num_aircomp_J >= 0, "num_aircomp_J must be >= 0");
  require(num_edge_K >= 0, "num_edge_K must be >= 0");
  require(bcd_epsilon0 > 0.0, "bcd_epsilon0 must be > 0");
  require(bcd_max_iters >= 1, "bcd_max_iters must be >= 1");
  require(solver_feas_tol > 0.0, "solver_feas_tol must be > 0");
  require(solver_opt_tol > 0.0, "solver_opt_tol must be > 0");
  require(slot_duration() > 0.0, "slot duration T/I must be > 0");
}

SystemConfig paper_preset() {
  SystemConfig c;  // defaults are the Table-scale values
  return c;
}

SystemConfig desk_preset() {
  SystemConfig c;
  c.horizon_T = 20.0;
  c.num_slots_I = 20;
  c.num_aircomp_J = 5;
  c.num_edge_K = 5;
  c.data_demand_Dk = 0.6e6;
  return c;
}

Scenario generate_placement(const SystemConfig& config, const StreamRng& rng) {
  config.validate();
  Scenario s;
  s.num_aircomp_J = config.num_aircomp_J;
  s.num_edge_K = config.num_edge_K;
  s.num_slots_I = config.num_slots_I;
  s.bs_position = Eigen::Vector2d(config.area_side / 2.0, config.area_side / 2.0);

  const int n = config.num_ues();
  s.ue_positions.reserve(static_cast<std::size_t>(n));
  s.ue_role.reserve(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    SplitMix64 g = rng.stream(rng_purpose::kPlacement, static_cast<std::uint64_t>(u));
    Eigen::Vector2d pos;
    do {
      pos.x() = g.uniform(0.0, config.area_side);
      pos.y() = g.uniform(0.0, config.area_side);
    } while ((pos - s.bs_position).norm() <= 0.0);  // zero-distance draws are degenerate
    s.ue_positions.push_back(pos);
    s.ue_role.push_back(u < config.num_aircomp_J ? UeRole::Aircomp : UeRole::Edge);
  }
  return s;
}

std::complex<double> rician_channel(double d, const SystemConfig& config,
                                    SplitMix64& rng) {
  if (!(d > 0.0)) throw std::domain_error("rician_channel: distance must be > 0");
  const double kappa = config.rician_kappa;
  const std::complex<double> los(1.0, 0.0);
  const double n_re = rng.normal();
  const double n_im = rng.normal();
  const std::complex<double> nlos(n_re / std::sqrt(2.0), n_im / std::sqrt(2.0));
  const double amp = std::sqrt(config.pathloss_ref_beta0 / (d * d));
  return amp * (std::sqrt(kappa / (kappa + 1.0)) * los +
                std::sqrt(1.0 / (kappa + 1.0)) * nlos);
}

Scenario build_scenario(const SystemConfig& config, const StreamRng& rng) {
  Scenario s = generate_placement(config, rng);
  const int n = s.num_ues();
  const int slots = s.num_slots_I;
  s.channels.resize(n, slots);
  for (int u = 0; u < n; ++u) {
    const double d = s.distance(u);
    for (int i = 0; i < slots; ++i) {
      const std::uint64_t stream_id =
          static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(slots) +
          static_cast<std::uint64_t>(i);
      SplitMix64 g = rng.stream(rng_purpose::kChannel, stream_id);
      s.channels(u, i) = rician_channel(d, config, g);
    }
  }
  return s;
}

namespace {

std::ostream& full(std::ostream& out) {
  out << std::setprecision(17);
  return out;
}

}  // namespace

void export_scenario(const Scenario& s, std::ostream& out) {
  full(out);
  out << "# hybridcomp scenario v1\n";
  out << "num_aircomp_J " << s.num_aircomp_J << "\n";
  out << "num_edge_K " << s.num_edge_K << "\n";
  out << "num_slots_I " << s.num_slots_I << "\n";
  out << "bs " << s.bs_position.x() << " " << s.bs_position.y() << "\n";
  for (int u = 0; u < s.num_ues(); ++u) {
    out << "ue " << u << " "
        << (s.ue_role[static_cast<std::size_t>(u)] == UeRole::Aircomp ? "aircomp" : "edge")
        << " " << s.ue_positions[static_cast<std::size_t>(u)].x() << " "
        << s.ue_positions[static_cast<std::size_t>(u)].y() << "\n";
  }
  for (int u = 0; u < s.num_ues(); ++u)
    for (int i = 0; i < s.num_slots_I; ++i)
      out << "ch " << u << " " << i << " " << s.channels(u, i).real() << " "
          << s.channels(u, i).imag() << "\n";
}

void export_scenario_file(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  export_scenario(s, out);
  if (!out) throw IoError("write failed: " + path);
}

Scenario import_scenario(std::istream& in) {
  Scenario s;
  std::string line;
  bool sized = false;
  int j = -1, k = -1, slots = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "num_aircomp_J") {
      ls >> j;
    } else if (tag == "num_edge_K") {
      ls >> k;
    } else if (tag == "num_slots_I") {
      ls >> slots;
    } else if (tag == "bs") {
      ls >> s.bs_position.x() >> s.bs_position.y();
    } else if (tag == "ue") {
      int u;
      std::string role;
      double x, y;
      ls >> u >> role >> x >> y;
      if (!ls) throw IoError("scenario parse error: " + line);
      if (static_cast<int>(s.ue_positions.size()) != u)
        throw IoError("scenario UE records out of order");
      s.ue_positions.emplace_back(x, y);
      s.ue_role.push_back(role == "aircomp" ? UeRole::Aircomp : UeRole::Edge);
    } else if (tag == "ch") {
      if (!sized) {
        if (j < 0 || k < 0 || slots < 0) throw IoError("scenario header incomplete");
        s.num_aircomp_J = j;
        s.num_edge_K = k;
        s.num_slots_I = slots;
        s.channels.resize(j + k, slots);
        sized = true;
      }
      int u, i;
      double re, im;
      ls >> u >> i >> re >> im;
      if (!ls) throw IoError("scenario parse error: " + line);
      s.channels(u, i) = std::complex<double>(re, im);
    } else {
      throw IoError("unknown scenario record: " + tag);
    }
  }
  if (!sized) {
    if (j < 0 || k < 0 || slots < 0) throw IoError("scenario header incomplete");
    s.num_aircomp_J = j;
    s.num_edge_K = k;
    s.num_slots_I = slots;
    s.channels.resize(j + k, slots);
  }
  if (static_cast<int>(s.ue_positions.size()) != s.num_ues())
    throw IoError("scenario UE count mismatch");
  return s;
}

Scenario import_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for read: " + path);
  return import_scenario(in);
}

}  // namespace hybridcomp
