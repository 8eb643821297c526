#include "hybridcomp/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hybridcomp {

DecisionSet DecisionSet::zeros(int K, int J, int I) {
  DecisionSet d;
  d.num_edge_K = K;
  d.num_aircomp_J = J;
  d.num_slots_I = I;
  d.schedule_weight = Eigen::MatrixXd::Zero(K, I);
  d.offload_bits = Eigen::MatrixXd::Zero(K, I);
  d.edge_tx_power = Eigen::MatrixXd::Zero(K, I);
  d.aircomp_tx_gain = Eigen::MatrixXcd::Zero(J, I);
  d.rx_gain = Eigen::VectorXcd::Zero(I);
  d.aircomp_power_slack = Eigen::MatrixXd::Zero(J, I);
  return d;
}

int DecisionSet::scheduled_ue(int i) const {
  if (num_edge_K == 0) return -1;
  int best = 0;
  for (int k = 1; k < num_edge_K; ++k)
    if (schedule_weight(k, i) > schedule_weight(best, i)) best = k;
  return best;
}

bool DecisionSet::same_shape(const DecisionSet& o) const {
  return num_edge_K == o.num_edge_K && num_aircomp_J == o.num_aircomp_J &&
         num_slots_I == o.num_slots_I;
}

double FeasibilityReport::worst() const {
  return std::max({schedule, edge_power, aircomp_power, mse, data, capacity,
                   rate, coupling});
}

ConstraintFamily FeasibilityReport::worst_family() const {
  const double values[] = {schedule, edge_power, aircomp_power, mse,
                           data,     capacity,   rate,          coupling};
  const ConstraintFamily families[] = {
      ConstraintFamily::Schedule, ConstraintFamily::EdgePower,
      ConstraintFamily::AircompPower, ConstraintFamily::Mse,
      ConstraintFamily::Data, ConstraintFamily::Capacity,
      ConstraintFamily::Rate, ConstraintFamily::Coupling};
  int best = 0;
  for (int i = 1; i < 8; ++i)
    if (values[i] > values[best]) best = i;
  return families[best];
}

namespace {

void check_shapes(const Scenario& s, const DecisionSet& d) {
  if (d.num_edge_K != s.num_edge_K || d.num_aircomp_J != s.num_aircomp_J ||
      d.num_slots_I != s.num_slots_I)
    throw std::invalid_argument("decision/scenario shape mismatch");
  if (d.schedule_weight.rows() != d.num_edge_K ||
      d.schedule_weight.cols() != d.num_slots_I ||
      d.offload_bits.rows() != d.num_edge_K ||
      d.offload_bits.cols() != d.num_slots_I ||
      d.edge_tx_power.rows() != d.num_edge_K ||
      d.edge_tx_power.cols() != d.num_slots_I ||
      d.aircomp_tx_gain.rows() != d.num_aircomp_J ||
      d.aircomp_tx_gain.cols() != d.num_slots_I ||
      d.rx_gain.size() != d.num_slots_I)
    throw std::invalid_argument("decision arrays have inconsistent shapes");
}

}  // namespace

double mse_analytic(const SystemConfig& config, const Scenario& scenario,
                    const DecisionSet& d, int slot) {
  check_shapes(scenario, d);
  const std::complex<double> eta = d.rx_gain(slot);
  double out = 0.0;
  for (int j = 0; j < d.num_aircomp_J; ++j) {
    const std::complex<double> t =
        eta * d.aircomp_tx_gain(j, slot) * scenario.aircomp_channel(j, slot) - 1.0;
    out += std::norm(t);
  }
  out += std::norm(eta) * config.noise_power_sigma0sq;
  for (int k = 0; k < d.num_edge_K; ++k) {
    const double a = d.schedule_weight(k, slot);
    out += std::norm(eta) * a * a * d.edge_tx_power(k, slot) *
           std::norm(scenario.edge_channel(k, slot));
  }
  return out;
}

double mse_monte_carlo(const SystemConfig& config, const Scenario& scenario,
                       const DecisionSet& d, int slot, std::int64_t samples,
                       SplitMix64& rng, SignalModel signal_model) {
  check_shapes(scenario, d);
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const std::complex<double> eta = d.rx_gain(slot);
  const double noise_amp = std::sqrt(config.noise_power_sigma0sq / 2.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  double acc = 0.0;
  for (std::int64_t n = 0; n < samples; ++n) {
    std::complex<double> received(0.0, 0.0);
    std::complex<double> target(0.0, 0.0);
    for (int j = 0; j < d.num_aircomp_J; ++j) {
      std::complex<double> s;
      if (signal_model == SignalModel::ComplexGaussian)
        s = std::complex<double>(rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2);
      else
        s = std::complex<double>(rng.uniform() < 0.5 ? -1.0 : 1.0, 0.0);
      received += scenario.aircomp_channel(j, slot) * d.aircomp_tx_gain(j, slot) * s;
      target += s;
    }
    for (int k = 0; k < d.num_edge_K; ++k) {
      std::complex<double> x;
      if (signal_model == SignalModel::ComplexGaussian)
        x = std::complex<double>(rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2);
      else
        x = std::complex<double>(rng.uniform() < 0.5 ? -1.0 : 1.0, 0.0);
      received += d.schedule_weight(k, slot) * scenario.edge_channel(k, slot) *
                  std::sqrt(d.edge_tx_power(k, slot)) * x;
    }
    received += std::complex<double>(rng.normal() * noise_amp, rng.normal() * noise_amp);
    acc += std::norm(eta * received - target);
  }
  return acc / static_cast<double>(samples);
}

EnergyBreakdown energy(const SystemConfig& config, const DecisionSet& d) {
  const double tau = config.slot_duration();
  EnergyBreakdown e;
  for (int i = 0; i < d.num_slots_I; ++i) {
    double load_bits = 0.0;
    for (int k = 0; k < d.num_edge_K; ++k) {
      e.e_edge_tran += d.schedule_weight(k, i) * d.edge_tx_power(k, i) * tau;
      load_bits += d.schedule_weight(k, i) * d.offload_bits(k, i);
    }
    for (int j = 0; j < d.num_aircomp_J; ++j)
      e.e_aircomp_tran += std::norm(d.aircomp_tx_gain(j, i)) * tau;
    const double cycles = config.cycles_per_bit_c0 * load_bits;
    e.e_comp += config.capacitance_gamma * cycles * cycles * cycles / (tau * tau);
  }
  return e;
}

double rate_capacity_bits(const SystemConfig& config, const Scenario& scenario,
                          const DecisionSet& d, int k, int i) {
  check_shapes(scenario, d);
  double interference = config.noise_power_sigma0sq;
  for (int j = 0; j < d.num_aircomp_J; ++j)
    interference += std::norm(scenario.aircomp_channel(j, i) * d.aircomp_tx_gain(j, i));
  const double sinr =
      d.edge_tx_power(k, i) * std::norm(scenario.edge_channel(k, i)) / interference;
  return config.slot_duration() * config.bandwidth_B * std::log2(1.0 + sinr);
}

FeasibilityReport check_feasibility(const SystemConfig& config,
                                    const Scenario& scenario,
                                    const DecisionSet& d, double tol) {
  check_shapes(scenario, d);
  FeasibilityReport r;
  const double tau = config.slot_duration();
  const double cap_bits = config.max_bits_per_slot();

  for (int i = 0; i < d.num_slots_I; ++i) {
    double col_sum = 0.0;
    for (int k = 0; k < d.num_edge_K; ++k) {
      const double a = d.schedule_weight(k, i);
      col_sum += a;
      if (d.schedule_binary) {
        // each entry must sit exactly on {0, 1}
        r.schedule = std::max(r.schedule, std::min(std::abs(a), std::abs(a - 1.0)));
      } else {
        r.schedule = std::max(r.schedule, std::max(0.0, -a));
        r.schedule = std::max(r.schedule, std::max(0.0, a - 1.0));
      }
      r.edge_power = std::max(
          r.edge_power,
          std::max(std::max(0.0, d.edge_tx_power(k, i) - config.p_max_edge),
                   std::max(0.0, -d.edge_tx_power(k, i))) /
              config.p_max_edge);
      r.coupling = std::max(
          r.coupling,
          std::max(0.0, d.offload_bits(k, i) - a * cap_bits) / cap_bits);
      r.coupling = std::max(r.coupling, std::max(0.0, -d.offload_bits(k, i)) / cap_bits);
      const double rate = rate_capacity_bits(config, scenario, d, k, i);
      r.rate = std::max(r.rate, std::max(0.0, d.offload_bits(k, i) - rate) /
                                    config.data_demand_Dk);
    }
    if (d.num_edge_K > 0)
      r.schedule = std::max(r.schedule, std::abs(col_sum - 1.0));

    for (int j = 0; j < d.num_aircomp_J; ++j)
      r.aircomp_power = std::max(
          r.aircomp_power,
          std::max(0.0, std::norm(d.aircomp_tx_gain(j, i)) - config.p_max_aircomp) /
              config.p_max_aircomp);

    r.mse = std::max(r.mse,
                     std::max(0.0, mse_analytic(config, scenario, d, i) -
                                       config.mse_threshold_zeta) /
                         config.mse_threshold_zeta);

    double load_bits = 0.0;
    for (int k = 0; k < d.num_edge_K; ++k)
      load_bits += d.schedule_weight(k, i) * d.offload_bits(k, i);
    r.capacity = std::max(r.capacity,
                          std::max(0.0, config.cycles_per_bit_c0 * load_bits -
                                            tau * config.max_cpu_f) /
                              (tau * config.max_cpu_f));
  }

  for (int k = 0; k < d.num_edge_K; ++k) {
    const double shipped = d.offload_bits.row(k).sum();
    r.data = std::max(r.data, std::max(0.0, config.data_demand_Dk - shipped) /
                                  config.data_demand_Dk);
  }

  r.feasible = r.worst() <= tol;
  return r;
}

namespace {

std::ostream& full(std::ostream& out) {
  out << std::setprecision(17);
  return out;
}

void put_matrix(std::ostream& out, const char* tag, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out << tag << " " << r << " " << c << " " << m(r, c) << "\n";
}

}  // namespace

void export_decisions(const DecisionSet& d, std::ostream& out) {
  full(out);
  out << "# hybridcomp decisions v1\n";
  out << "shape " << d.num_edge_K << " " << d.num_aircomp_J << " " << d.num_slots_I
      << " " << (d.schedule_binary ? 1 : 0) << "\n";
  put_matrix(out, "alpha", d.schedule_weight);
  put_matrix(out, "bits", d.offload_bits);
  put_matrix(out, "power", d.edge_tx_power);
  put_matrix(out, "slack", d.aircomp_power_slack);
  for (Eigen::Index r = 0; r < d.aircomp_tx_gain.rows(); ++r)
    for (Eigen::Index c = 0; c < d.aircomp_tx_gain.cols(); ++c)
      out << "gain " << r << " " << c << " " << d.aircomp_tx_gain(r, c).real()
          << " " << d.aircomp_tx_gain(r, c).imag() << "\n";
  for (Eigen::Index i = 0; i < d.rx_gain.size(); ++i)
    out << "rx " << i << " " << d.rx_gain(i).real() << " " << d.rx_gain(i).imag()
        << "\n";
}

void export_decisions_file(const DecisionSet& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  export_decisions(d, out);
  if (!out) throw IoError("write failed: " + path);
}

DecisionSet import_decisions(std::istream& in) {
  DecisionSet d;
  std::string line;
  bool sized = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "shape") {
      int k, j, i, binary;
      ls >> k >> j >> i >> binary;
      if (!ls) throw IoError("decisions parse error: " + line);
      d = DecisionSet::zeros(k, j, i);
      d.schedule_binary = binary != 0;
      sized = true;
      continue;
    }
    if (!sized) throw IoError("decisions file missing shape header");
    if (tag == "alpha" || tag == "bits" || tag == "power" || tag == "slack") {
      int r, c;
      double v;
      ls >> r >> c >> v;
      if (!ls) throw IoError("decisions parse error: " + line);
      if (tag == "alpha") d.schedule_weight(r, c) = v;
      else if (tag == "bits") d.offload_bits(r, c) = v;
      else if (tag == "power") d.edge_tx_power(r, c) = v;
      else d.aircomp_power_slack(r, c) = v;
    } else if (tag == "gain") {
      int r, c;
      double re, im;
      ls >> r >> c >> re >> im;
      if (!ls) throw IoError("decisions parse error: " + line);
      d.aircomp_tx_gain(r, c) = std::complex<double>(re, im);
    } else if (tag == "rx") {
      int i;
      double re, im;
      ls >> i >> re >> im;
      if (!ls) throw IoError("decisions parse error: " + line);
      d.rx_gain(i) = std::complex<double>(re, im);
    } else {
      throw IoError("unknown decisions record: " + tag);
    }
  }
  if (!sized) throw IoError("decisions file missing shape header");
  return d;
}

DecisionSet import_decisions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for read: " + path);
  return import_decisions(in);
}

}  // namespace hybridcomp
