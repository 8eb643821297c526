#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"

using namespace hybridcomp;

namespace {

// J=2, K=1 single-slot fixture with hand-picked channels:
// h_air = (1, 0.5), h_edge = 0.5
Scenario mse_fixture_scenario() {
  Eigen::MatrixXcd ch(3, 1);
  ch(0, 0) = 1.0;
  ch(1, 0) = 0.5;
  ch(2, 0) = 0.5;
  return oracles::synthetic_scenario(2, 1, 1, ch);
}

DecisionSet mse_fixture_decisions() {
  DecisionSet d = DecisionSet::zeros(1, 2, 1);
  d.aircomp_tx_gain(0, 0) = 1.0;
  d.aircomp_tx_gain(1, 0) = 1.0;
  d.rx_gain(0) = 1.0;
  d.schedule_weight(0, 0) = 1.0;
  d.edge_tx_power(0, 0) = 0.04;
  return d;
}

SystemConfig mse_fixture_config() {
  SystemConfig c = desk_preset();
  c.num_aircomp_J = 2;
  c.num_edge_K = 1;
  c.num_slots_I = 1;
  c.noise_power_sigma0sq = 0.1;
  return c;
}

}  // namespace

TEST_CASE("mse: zero receive gain leaves every aggregation term at one") {
  SystemConfig c = mse_fixture_config();
  Scenario s = mse_fixture_scenario();
  DecisionSet d = mse_fixture_decisions();
  d.rx_gain(0) = 0.0;
  CHECK(mse_analytic(c, s, d, 0) == doctest::Approx(2.0));  // J
}

TEST_CASE("mse: perfect inversion with no noise or interference is zero") {
  SystemConfig c = mse_fixture_config();
  c.num_aircomp_J = 1;
  c.noise_power_sigma0sq = 1e-300;  // strictly positive per config contract
  Eigen::MatrixXcd ch(2, 1);
  ch(0, 0) = std::complex<double>(0.3, 0.4);
  ch(1, 0) = 0.5;
  Scenario s = oracles::synthetic_scenario(1, 1, 1, ch);
  DecisionSet d = DecisionSet::zeros(1, 1, 1);
  d.rx_gain(0) = 2.0;
  d.aircomp_tx_gain(0, 0) = 1.0 / (d.rx_gain(0) * ch(0, 0));
  CHECK(mse_analytic(c, s, d, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mse: worked two-UE case equals 0.36 and matches monte carlo") {
  SystemConfig c = mse_fixture_config();
  Scenario s = mse_fixture_scenario();
  DecisionSet d = mse_fixture_decisions();
  // |1*1*1 - 1|^2 + |1*1*0.5 - 1|^2 + 0.1 + 1*0.04*0.25 = 0.36
  const double analytic = mse_analytic(c, s, d, 0);
  CHECK(analytic == doctest::Approx(0.36));

  SplitMix64 rng(17);
  const double mc = mse_monte_carlo(c, s, d, 0, 1000000, rng);
  CHECK(std::abs(mc - analytic) <= 0.01 * analytic);
}

TEST_CASE("mse monte carlo: perfect inversion estimate goes to zero") {
  SystemConfig c = mse_fixture_config();
  c.num_aircomp_J = 1;
  c.noise_power_sigma0sq = 1e-300;
  Eigen::MatrixXcd ch(2, 1);
  ch(0, 0) = 0.8;
  ch(1, 0) = 0.5;
  Scenario s = oracles::synthetic_scenario(1, 1, 1, ch);
  DecisionSet d = DecisionSet::zeros(1, 1, 1);
  d.rx_gain(0) = 1.25;
  d.aircomp_tx_gain(0, 0) = 1.0;  // eta * b * h = 1
  SplitMix64 rng(3);
  CHECK(mse_monte_carlo(c, s, d, 0, 10000, rng) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mse monte carlo is insensitive to the signal distribution") {
  SystemConfig c = mse_fixture_config();
  Scenario s = mse_fixture_scenario();
  DecisionSet d = mse_fixture_decisions();
  SplitMix64 rng_a(23), rng_b(29);
  const double gauss =
      mse_monte_carlo(c, s, d, 0, 400000, rng_a, SignalModel::ComplexGaussian);
  const double binary =
      mse_monte_carlo(c, s, d, 0, 400000, rng_b, SignalModel::BinaryReal);
  CHECK(std::abs(gauss - binary) <= 0.02 * std::max(gauss, binary));
}

TEST_CASE("energy: all-zero decisions cost nothing") {
  SystemConfig c = desk_preset();
  DecisionSet d = DecisionSet::zeros(c.num_edge_K, c.num_aircomp_J, c.num_slots_I);
  const EnergyBreakdown e = energy(c, d);
  CHECK(e.e_edge_tran == 0.0);
  CHECK(e.e_aircomp_tran == 0.0);
  CHECK(e.e_comp == 0.0);
  CHECK(e.total() == 0.0);
}

TEST_CASE("energy: single scheduled watt-second") {
  SystemConfig c = desk_preset();
  c.num_slots_I = 1;
  c.horizon_T = 1.0;
  c.num_edge_K = 1;
  c.num_aircomp_J = 1;
  DecisionSet d = DecisionSet::zeros(1, 1, 1);
  d.schedule_weight(0, 0) = 1.0;
  d.edge_tx_power(0, 0) = 1.0;
  const EnergyBreakdown e = energy(c, d);
  CHECK(e.total() == doctest::Approx(1.0));
  CHECK(e.e_edge_tran == doctest::Approx(1.0));
}

TEST_CASE("energy: cubic computation term, with independent recomputation") {
  SystemConfig c = desk_preset();
  c.capacitance_gamma = 1e-27;
  c.cycles_per_bit_c0 = 1e3;
  c.num_slots_I = 4;
  c.horizon_T = 4.0;  // tau = 1 s
  c.num_edge_K = 2;
  c.num_aircomp_J = 1;
  DecisionSet d = DecisionSet::zeros(2, 1, 4);
  d.schedule_weight(0, 0) = 1.0;
  d.offload_bits(0, 0) = 3e4;
  d.schedule_weight(1, 1) = 1.0;
  d.offload_bits(1, 1) = 1e4;
  d.schedule_weight(0, 2) = 1.0;
  d.schedule_weight(1, 3) = 1.0;

  // slot term gamma * (c0 * 3e4)^3 = 2.7e-5 J
  const EnergyBreakdown e = energy(c, d);
  double reference = 0.0;
  for (int i = 0; i < 4; ++i) {
    double load = 0.0;
    for (int k = 0; k < 2; ++k)
      load += d.schedule_weight(k, i) * d.offload_bits(k, i);
    reference += 1e-27 * std::pow(1e3 * load, 3.0);
  }
  CHECK(e.e_comp == doctest::Approx(reference));
  CHECK(1e-27 * std::pow(1e3 * 3e4, 3.0) == doctest::Approx(2.7e-5));
}

TEST_CASE("energy grows monotonically in each decision component") {
  SystemConfig c = desk_preset();
  c.num_edge_K = 2;
  c.num_aircomp_J = 2;
  c.num_slots_I = 3;
  SplitMix64 g(31);
  DecisionSet d = DecisionSet::zeros(2, 2, 3);
  for (int i = 0; i < 3; ++i) {
    d.schedule_weight(i % 2, i) = 1.0;
    d.offload_bits(i % 2, i) = g.uniform(0.0, 1e5);
    d.edge_tx_power(i % 2, i) = g.uniform(0.0, 0.5);
    for (int j = 0; j < 2; ++j)
      d.aircomp_tx_gain(j, i) = std::complex<double>(g.uniform(-1, 1), g.uniform(-1, 1));
  }
  const double base = energy(c, d).total();

  DecisionSet up = d;
  up.aircomp_tx_gain(0, 1) *= 1.3;
  CHECK(energy(c, up).total() >= base);

  up = d;
  up.edge_tx_power(1, 1) += 0.1;
  CHECK(energy(c, up).total() >= base);

  up = d;
  up.offload_bits(0, 0) *= 1.7;
  CHECK(energy(c, up).total() >= base);
}

TEST_CASE("computation energy scales cubically with the offload volume") {
  SystemConfig c = desk_preset();
  DecisionSet d = DecisionSet::zeros(c.num_edge_K, c.num_aircomp_J, c.num_slots_I);
  for (int i = 0; i < c.num_slots_I; ++i) {
    d.schedule_weight(i % c.num_edge_K, i) = 1.0;
    d.offload_bits(i % c.num_edge_K, i) = 1e4 + 100.0 * i;
  }
  const double base = energy(c, d).e_comp;
  DecisionSet scaled = d;
  scaled.offload_bits *= 2.0;
  CHECK(energy(c, scaled).e_comp == doctest::Approx(8.0 * base).epsilon(1e-12));
}

TEST_CASE("rate capacity: zero power carries zero bits") {
  SystemConfig c = mse_fixture_config();
  Scenario s = mse_fixture_scenario();
  DecisionSet d = mse_fixture_decisions();
  d.edge_tx_power(0, 0) = 0.0;
  CHECK(rate_capacity_bits(c, s, d, 0, 0) == 0.0);
}

TEST_CASE("rate capacity: SINR of three at 5 MHz over one second is 1e7 bits") {
  SystemConfig c = desk_preset();
  c.num_aircomp_J = 0;
  c.num_edge_K = 1;
  c.num_slots_I = 1;
  c.horizon_T = 1.0;
  c.bandwidth_B = 5e6;
  c.noise_power_sigma0sq = 1.0;  // SINR = p |h|^2 / sigma^2 = 3
  Eigen::MatrixXcd ch(1, 1);
  ch(0, 0) = 1.0;
  Scenario s = oracles::synthetic_scenario(0, 1, 1, ch);
  DecisionSet d = DecisionSet::zeros(1, 0, 1);
  d.edge_tx_power(0, 0) = 3.0;
  CHECK(rate_capacity_bits(c, s, d, 0, 0) == doctest::Approx(1e7));
}

TEST_CASE("rate capacity matches a straight-line reimplementation") {
  SystemConfig c = desk_preset();
  c.num_aircomp_J = 3;
  c.num_edge_K = 2;
  c.num_slots_I = 5;
  StreamRng rng(37);
  Scenario s = build_scenario(c, rng);
  SplitMix64 g(41);
  DecisionSet d = DecisionSet::zeros(2, 3, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 3; ++j)
      d.aircomp_tx_gain(j, i) =
          std::complex<double>(g.uniform(-0.5, 0.5), g.uniform(-0.5, 0.5));
    for (int k = 0; k < 2; ++k) d.edge_tx_power(k, i) = g.uniform(0.0, 1.0);
  }
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 2; ++k)
      CHECK(rate_capacity_bits(c, s, d, k, i) ==
            doctest::Approx(oracles::rate_bits_reference(c, s, d, k, i))
                .epsilon(1e-12));
}

TEST_CASE("feasibility: doubled power budget reads as residual one") {
  SystemConfig c = mse_fixture_config();
  c.mse_threshold_zeta = 10.0;  // keep the MSE family quiet
  Scenario s = mse_fixture_scenario();
  DecisionSet d = mse_fixture_decisions();
  d.edge_tx_power(0, 0) = 2.0 * c.p_max_edge;
  const FeasibilityReport r = check_feasibility(c, s, d, 1e-6);
  CHECK(r.edge_power == doctest::Approx(1.0));
  CHECK_FALSE(r.feasible);
  CHECK(r.worst_family() == ConstraintFamily::EdgePower);
}

TEST_CASE("feasibility: demand met exactly is a zero data residual") {
  SystemConfig c = desk_preset();
  c.num_edge_K = 1;
  c.num_aircomp_J = 1;
  c.num_slots_I = 2;
  c.horizon_T = 2.0;
  c.data_demand_Dk = 4e5;
  Eigen::MatrixXcd ch = Eigen::MatrixXcd::Constant(2, 2, 1.0);
  Scenario s = oracles::synthetic_scenario(1, 1, 2, ch);
  DecisionSet d = DecisionSet::zeros(1, 1, 2);
  d.schedule_weight(0, 0) = 1.0;
  d.schedule_weight(0, 1) = 1.0;
  d.offload_bits(0, 0) = 2e5;
  d.offload_bits(0, 1) = 2e5;
  d.edge_tx_power(0, 0) = 0.5;
  d.edge_tx_power(0, 1) = 0.5;
  d.rx_gain(0) = d.rx_gain(1) = 0.0;
  const FeasibilityReport r = check_feasibility(c, s, d, 1e-6);
  CHECK(r.data == 0.0);
}

TEST_CASE("feasibility evaluation is pure") {
  SystemConfig c = mse_fixture_config();
  Scenario s = mse_fixture_scenario();
  DecisionSet d = mse_fixture_decisions();
  const FeasibilityReport a = check_feasibility(c, s, d, 1e-6);
  const FeasibilityReport b = check_feasibility(c, s, d, 1e-6);
  CHECK(a.schedule == b.schedule);
  CHECK(a.edge_power == b.edge_power);
  CHECK(a.aircomp_power == b.aircomp_power);
  CHECK(a.mse == b.mse);
  CHECK(a.data == b.data);
  CHECK(a.capacity == b.capacity);
  CHECK(a.rate == b.rate);
  CHECK(a.coupling == b.coupling);
  CHECK(a.feasible == b.feasible);
}

TEST_CASE("shape mismatch raises a structural error") {
  SystemConfig c = mse_fixture_config();
  Scenario s = mse_fixture_scenario();
  DecisionSet d = DecisionSet::zeros(2, 2, 1);  // K mismatch
  CHECK_THROWS_AS(check_feasibility(c, s, d, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(mse_analytic(c, s, d, 0), std::invalid_argument);
}

TEST_CASE("decision set text round-trip") {
  SplitMix64 g(53);
  DecisionSet d = DecisionSet::zeros(2, 3, 4);
  d.schedule_binary = false;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 2; ++k) {
      d.schedule_weight(k, i) = g.uniform();
      d.offload_bits(k, i) = g.uniform(0, 1e6);
      d.edge_tx_power(k, i) = g.uniform();
    }
    for (int j = 0; j < 3; ++j) {
      d.aircomp_tx_gain(j, i) = std::complex<double>(g.normal(), g.normal());
      d.aircomp_power_slack(j, i) = g.uniform();
    }
    d.rx_gain(i) = std::complex<double>(g.normal(), g.normal());
  }
  std::stringstream buf;
  export_decisions(d, buf);
  const DecisionSet back = import_decisions(buf);
  CHECK(back.schedule_binary == d.schedule_binary);
  CHECK(back.schedule_weight == d.schedule_weight);
  CHECK(back.offload_bits == d.offload_bits);
  CHECK(back.edge_tx_power == d.edge_tx_power);
  CHECK(back.aircomp_tx_gain == d.aircomp_tx_gain);
  CHECK(back.aircomp_power_slack == d.aircomp_power_slack);
  CHECK(back.rx_gain == d.rx_gain);
}
