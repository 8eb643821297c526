#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "hybridcomp/harness.hpp"

namespace hybridcomp {

const char* method_name(Method m) {
  switch (m) {
    case Method::Bcd: return "bcd";
    case Method::EqualOffloading: return "equal";
    case Method::ChannelInversion: return "inversion";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "bcd") return Method::Bcd;
  if (name == "equal") return Method::EqualOffloading;
  if (name == "inversion") return Method::ChannelInversion;
  throw ConfigError("unknown method: " + name + " (expected bcd|equal|inversion)");
}

SystemConfig preset_by_name(const std::string& name) {
  if (name == "paper") return paper_preset();
  if (name == "desk") return desk_preset();
  throw ConfigError("unknown preset: " + name + " (expected paper|desk)");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": " + value);
  }
  if (pos != value.size())
    throw ConfigError("trailing characters in value for " + key + ": " + value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("bad boolean value for " + key + ": " + value);
}

using Setter = std::function<void(SystemConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& config_setters() {
  auto d = [](double SystemConfig::* field) {
    return [field](SystemConfig& c, const std::string& k, const std::string& v) {
      c.*field = parse_double(k, v);
    };
  };
  auto i = [](int SystemConfig::* field) {
    return [field](SystemConfig& c, const std::string& k, const std::string& v) {
      c.*field = static_cast<int>(parse_double(k, v));
    };
  };
  static const std::map<std::string, Setter> setters = {
      {"horizon_T", d(&SystemConfig::horizon_T)},
      {"num_slots_I", i(&SystemConfig::num_slots_I)},
      {"bandwidth_B", d(&SystemConfig::bandwidth_B)},
      {"data_demand_Dk", d(&SystemConfig::data_demand_Dk)},
      {"cycles_per_bit_c0", d(&SystemConfig::cycles_per_bit_c0)},
      {"max_cpu_f", d(&SystemConfig::max_cpu_f)},
      {"capacitance_gamma", d(&SystemConfig::capacitance_gamma)},
      {"noise_power_sigma0sq", d(&SystemConfig::noise_power_sigma0sq)},
      {"rician_kappa", d(&SystemConfig::rician_kappa)},
      {"pathloss_ref_beta0", d(&SystemConfig::pathloss_ref_beta0)},
      {"p_max_edge", d(&SystemConfig::p_max_edge)},
      {"p_max_aircomp", d(&SystemConfig::p_max_aircomp)},
      {"mse_threshold_zeta", d(&SystemConfig::mse_threshold_zeta)},
      {"area_side", d(&SystemConfig::area_side)},
      {"num_aircomp_J", i(&SystemConfig::num_aircomp_J)},
      {"num_edge_K", i(&SystemConfig::num_edge_K)},
      {"bcd_epsilon0", d(&SystemConfig::bcd_epsilon0)},
      {"bcd_max_iters", i(&SystemConfig::bcd_max_iters)},
      {"solver_feas_tol", d(&SystemConfig::solver_feas_tol)},
      {"solver_opt_tol", d(&SystemConfig::solver_opt_tol)},
      {"rng_seed",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         try {
           c.rng_seed = std::stoull(v);
         } catch (const std::exception&) {
           throw ConfigError("bad seed value for " + k + ": " + v);
         }
       }},
      {"conjugate_phase",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.conjugate_phase = parse_bool(k, v);
       }},
  };
  return setters;
}

}  // namespace

SystemConfig load_config(std::istream& in, SystemConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto& setters = config_setters();
    auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key: " + key);
    it->second(base, key, value);
  }
  base.validate();
  return base;
}

SystemConfig load_config_file(const std::string& path, SystemConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  return load_config(in, std::move(base));
}

void save_config_file(const SystemConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  out << std::setprecision(17);
  out << "horizon_T = " << c.horizon_T << "\n";
  out << "num_slots_I = " << c.num_slots_I << "\n";
  out << "bandwidth_B = " << c.bandwidth_B << "\n";
  out << "data_demand_Dk = " << c.data_demand_Dk << "\n";
  out << "cycles_per_bit_c0 = " << c.cycles_per_bit_c0 << "\n";
  out << "max_cpu_f = " << c.max_cpu_f << "\n";
  out << "capacitance_gamma = " << c.capacitance_gamma << "\n";
  out << "noise_power_sigma0sq = " << c.noise_power_sigma0sq << "\n";
  out << "rician_kappa = " << c.rician_kappa << "\n";
  out << "pathloss_ref_beta0 = " << c.pathloss_ref_beta0 << "\n";
  out << "p_max_edge = " << c.p_max_edge << "\n";
  out << "p_max_aircomp = " << c.p_max_aircomp << "\n";
  out << "mse_threshold_zeta = " << c.mse_threshold_zeta << "\n";
  out << "area_side = " << c.area_side << "\n";
  out << "num_aircomp_J = " << c.num_aircomp_J << "\n";
  out << "num_edge_K = " << c.num_edge_K << "\n";
  out << "bcd_epsilon0 = " << c.bcd_epsilon0 << "\n";
  out << "bcd_max_iters = " << c.bcd_max_iters << "\n";
  out << "solver_feas_tol = " << c.solver_feas_tol << "\n";
  out << "solver_opt_tol = " << c.solver_opt_tol << "\n";
  out << "rng_seed = " << c.rng_seed << "\n";
  out << "conjugate_phase = " << (c.conjugate_phase ? "true" : "false") << "\n";
  if (!out) throw IoError("write failed: " + path);
}

namespace {

const char* kSweepParameters[] = {"mse_threshold_zeta", "p_max_edge", "num_edge_K",
                                  "horizon_T", "data_demand_Dk"};

bool known_sweep_parameter(const std::string& p) {
  for (const char* q : kSweepParameters)
    if (p == q) return true;
  return false;
}

}  // namespace

void SweepSpec::validate() const {
  if (!known_sweep_parameter(parameter))
    throw ConfigError("unknown sweep parameter: " + parameter);
  if (values.empty()) throw ConfigError("sweep value list is empty");
  const bool increasing = values.size() < 2 || values[1] > values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (increasing ? values[i] <= values[i - 1] : values[i] >= values[i - 1])
      throw ConfigError("sweep values must be strictly monotone");
  }
  if (methods.empty()) throw ConfigError("sweep method list is empty");
  if (seeds.empty()) throw ConfigError("sweep seed list is empty");
}

SweepSpec load_sweep_spec(std::istream& in) {
  SweepSpec spec;
  std::string line;
  int line_no = 0;
  auto split_list = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key == "parameter") {
      spec.parameter = value;
    } else if (key == "values") {
      for (const auto& v : split_list(value))
        spec.values.push_back(parse_double(key, v));
    } else if (key == "methods") {
      for (const auto& v : split_list(value)) spec.methods.push_back(parse_method(v));
    } else if (key == "seeds") {
      for (const auto& v : split_list(value)) {
        try {
          spec.seeds.push_back(std::stoull(v));
        } catch (const std::exception&) {
          throw ConfigError("bad seed: " + v);
        }
      }
    } else {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": unknown sweep key: " + key);
    }
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep spec: " + path);
  return load_sweep_spec(in);
}

SystemConfig apply_swept_value(const SystemConfig& base, const std::string& parameter,
                               double value) {
  SystemConfig c = base;
  if (parameter == "mse_threshold_zeta") {
    c.mse_threshold_zeta = value;
  } else if (parameter == "p_max_edge") {
    c.p_max_edge = value;
  } else if (parameter == "horizon_T") {
    c.horizon_T = value;
  } else if (parameter == "data_demand_Dk") {
    c.data_demand_Dk = value;
  } else if (parameter == "num_edge_K") {
    const int total = base.num_aircomp_J + base.num_edge_K;
    const int k = static_cast<int>(value);
    if (k < 1 || k >= total)
      throw ConfigError("num_edge_K sweep value out of range for fixed J+K");
    c.num_edge_K = k;
    c.num_aircomp_J = total - k;
  } else {
    throw ConfigError("unknown sweep parameter: " + parameter);
  }
  c.validate();
  return c;
}

}  // namespace hybridcomp
