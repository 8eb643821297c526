#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hybridcomp/scenario.hpp"

using namespace hybridcomp;

TEST_CASE("config validation rejects degenerate domains") {
  SystemConfig c = desk_preset();
  CHECK_NOTHROW(c.validate());

  SystemConfig bad = c;
  bad.area_side = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  bad.num_slots_I = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  bad.mse_threshold_zeta = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  bad.noise_power_sigma0sq = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("placement lands inside the square with roles split J then K") {
  SystemConfig c = paper_preset();  // 20 nodes, 1000 m side
  StreamRng rng(42);
  Scenario s = generate_placement(c, rng);
  REQUIRE(s.num_ues() == 20);
  for (int u = 0; u < s.num_ues(); ++u) {
    CHECK(s.ue_positions[u].x() >= 0.0);
    CHECK(s.ue_positions[u].x() <= c.area_side);
    CHECK(s.ue_positions[u].y() >= 0.0);
    CHECK(s.ue_positions[u].y() <= c.area_side);
    CHECK(s.distance(u) > 0.0);
  }
  for (int u = 0; u < c.num_aircomp_J; ++u) CHECK(s.ue_role[u] == UeRole::Aircomp);
  for (int u = c.num_aircomp_J; u < s.num_ues(); ++u)
    CHECK(s.ue_role[u] == UeRole::Edge);
  CHECK(s.bs_position.x() == doctest::Approx(500.0));
  CHECK(s.bs_position.y() == doctest::Approx(500.0));
}

TEST_CASE("identical seeds give bit-identical placements and channels") {
  SystemConfig c = desk_preset();
  StreamRng rng_a(42), rng_b(42);
  Scenario a = build_scenario(c, rng_a);
  Scenario b = build_scenario(c, rng_b);
  for (int u = 0; u < a.num_ues(); ++u) {
    CHECK(a.ue_positions[u].x() == b.ue_positions[u].x());
    CHECK(a.ue_positions[u].y() == b.ue_positions[u].y());
  }
  CHECK(a.channels == b.channels);

  StreamRng rng_c(43);
  Scenario other = build_scenario(c, rng_c);
  CHECK(a.channels != other.channels);
}

TEST_CASE("rician draw rejects non-positive distance") {
  SystemConfig c = desk_preset();
  SplitMix64 g(1);
  CHECK_THROWS_AS(rician_channel(0.0, c, g), std::domain_error);
  CHECK_THROWS_AS(rician_channel(-5.0, c, g), std::domain_error);
}

TEST_CASE("infinite-kappa limit collapses to the deterministic path gain") {
  SystemConfig c = desk_preset();
  c.rician_kappa = 1e18;
  SplitMix64 g(7);
  const double d = 250.0;
  for (int t = 0; t < 100; ++t) {
    const std::complex<double> h = rician_channel(d, c, g);
    CHECK(std::abs(h) ==
          doctest::Approx(std::sqrt(c.pathloss_ref_beta0) / d).epsilon(1e-6));
  }
}

TEST_CASE("channel second moment matches the pathloss law") {
  // E|h|^2 = beta0 / d^2, checked to 3 sigma over 1e6 draws
  SystemConfig c = desk_preset();
  const double d = 1000.0;
  SplitMix64 g(11);
  const std::int64_t n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t t = 0; t < n; ++t) {
    const double p = std::norm(rician_channel(d, c, g));
    sum += p;
    sum_sq += p * p;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  const double expected = c.pathloss_ref_beta0 / (d * d);  // 1e-12
  CHECK(expected == doctest::Approx(1e-12));
  CHECK(std::abs(mean - expected) <= 3.0 * std::sqrt(var / n));
}

TEST_CASE("channel power variance matches the kappa mixture statistics") {
  // |h|^2 = (beta0/d^2) |mu + sigma CN(0,1)|^2 with mu^2 = k/(k+1),
  // sigma^2 = 1/(k+1); Var = (beta0/d^2)^2 (2 mu^2 sigma^2 + sigma^4)
  SystemConfig c = desk_preset();
  c.rician_kappa = 15.0;
  const double d = 400.0;
  const double gain = c.pathloss_ref_beta0 / (d * d);
  const double mu2 = c.rician_kappa / (c.rician_kappa + 1.0);
  const double s2 = 1.0 / (c.rician_kappa + 1.0);
  const double expected_var = gain * gain * (2.0 * mu2 * s2 + s2 * s2);

  SplitMix64 g(13);
  const std::int64_t n = 1000000;
  double m1 = 0.0, m2 = 0.0, m4 = 0.0;
  std::vector<double> sample;
  sample.reserve(n);
  for (std::int64_t t = 0; t < n; ++t) {
    const double p = std::norm(rician_channel(d, c, g));
    sample.push_back(p);
    m1 += p;
  }
  m1 /= n;
  for (double p : sample) {
    const double dev = p - m1;
    m2 += dev * dev;
    m4 += dev * dev * dev * dev;
  }
  m2 /= n;
  m4 /= n;
  const double stderr_var = std::sqrt((m4 - m2 * m2) / n);
  CHECK(std::abs(m2 - expected_var) <= 3.0 * stderr_var);
}

TEST_CASE("built scenario has S x I channels, all with positive power") {
  SystemConfig c = desk_preset();
  c.num_aircomp_J = 10;
  c.num_edge_K = 10;
  c.num_slots_I = 200;
  c.horizon_T = 200.0;
  StreamRng rng(5);
  Scenario s = build_scenario(c, rng);
  REQUIRE(s.channels.rows() == 20);
  REQUIRE(s.channels.cols() == 200);
  CHECK(s.channels.size() == 4000);
  for (int u = 0; u < 20; ++u)
    for (int i = 0; i < 200; ++i) CHECK(std::norm(s.channels(u, i)) > 0.0);
}

TEST_CASE("per-(UE, slot) channel streams are independent of build order") {
  SystemConfig c = desk_preset();
  StreamRng rng(99);
  Scenario s = build_scenario(c, rng);
  // regenerating one (UE, slot) stream in isolation reproduces the entry
  const int u = 3, i = 17;
  SplitMix64 g = rng.stream(rng_purpose::kChannel,
                            static_cast<std::uint64_t>(u) * c.num_slots_I + i);
  const std::complex<double> h = rician_channel(s.distance(u), c, g);
  CHECK(h == s.channels(u, i));
}

TEST_CASE("scenario text round-trip") {
  SystemConfig c = desk_preset();
  c.num_aircomp_J = 2;
  c.num_edge_K = 3;
  c.num_slots_I = 4;
  StreamRng rng(21);
  Scenario s = build_scenario(c, rng);

  std::stringstream buf;
  export_scenario(s, buf);
  Scenario back = import_scenario(buf);

  REQUIRE(back.num_ues() == s.num_ues());
  REQUIRE(back.num_slots_I == s.num_slots_I);
  CHECK(back.channels == s.channels);
  for (int u = 0; u < s.num_ues(); ++u) {
    CHECK(back.ue_positions[u] == s.ue_positions[u]);
    CHECK(back.ue_role[u] == s.ue_role[u]);
  }
  CHECK(back.bs_position == s.bs_position);
}
