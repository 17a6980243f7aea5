// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "rate_oracle.hpp"
#include "vlcsee/rng.hpp"
#include "vlcsee/rsma.hpp"

using namespace vlcsee;

namespace {

PowerLimits table_limits(int num_lus) {
  PowerLimits lim;
  lim.qos = Vector::Constant(num_lus, 2.0);
  lim.noise_lu = Vector::Constant(num_lus, 1e-13);
  return lim;
}

RsmaDecision random_decision(int num_lus, int num_leds, Rng& rng) {
  RsmaDecision d = RsmaDecision::zero(num_lus, num_leds);
  for (int i = 0; i <= num_lus; ++i) {
    for (int l = 0; l < num_leds; ++l) d.v(i, l) = rng.uniform(-1.5, 1.5);
  }
  for (int l = 0; l < num_leds; ++l) d.dc_bias(l) = rng.uniform(0, 5);
  for (int k = 0; k < num_lus; ++k) d.c(k) = rng.uniform(0, 3);
  return d;
}

Matrix random_channel(int num_lus, int num_leds, Rng& rng) {
  Matrix h(num_lus, num_leds);
  for (int k = 0; k < num_lus; ++k) {
    for (int l = 0; l < num_leds; ++l) h(k, l) = std::pow(10.0, rng.uniform(-6, -4));
  }
  return h;
}

}  // namespace

TEST_CASE("total power") {
  PowerLimits lim = table_limits(2);
  RsmaDecision d = RsmaDecision::zero(2, 6);
  d.dc_bias = Vector::Constant(6, 0.5);
  CHECK(total_power(d, lim) == 8.0);  // 2 V * 6 * 0.5 A + 2 W

  CHECK(total_power(RsmaDecision::zero(2, 6), lim) == lim.p_circuit);

  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const RsmaDecision r = random_decision(2, 4, rng);
    double expected = lim.p_circuit;
    for (int i = 0; i < 3; ++i) {
      for (int l = 0; l < 4; ++l) expected += r.v(i, l) * r.v(i, l);
    }
    for (int l = 0; l < 4; ++l) expected += lim.u_led * r.dc_bias(l);
    CHECK(total_power(r, lim) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("linear region margin") {
  PowerLimits lim = table_limits(1);
  RsmaDecision d = RsmaDecision::zero(1, 1);

  d.dc_bias(0) = 2.0;
  CHECK(linear_region_margin(d, lim)(0) == 2.0);  // min(2, 3)

  d.v(0, 0) = 1.0;
  d.v(1, 0) = 1.5;
  CHECK(linear_region_margin(d, lim)(0) == doctest::Approx(-0.5));

  d.v.setZero();
  d.dc_bias(0) = lim.i_min;
  CHECK(linear_region_margin(d, lim)(0) == 0.0);  // boundary feasible
}

TEST_CASE("user rates") {
  SUBCASE("no common stream means no common rate") {
    PowerLimits lim = table_limits(2);
    Rng rng(5);
    RsmaDecision d = random_decision(2, 3, rng);
    d.v.row(0).setZero();
    const LuRates rates = lu_rates(random_channel(2, 3, rng), d, lim);
    CHECK(rates.r_common.isZero());
  }

  SUBCASE("scalar fixture") {
    PowerLimits lim = table_limits(1);
    RsmaDecision d = RsmaDecision::zero(1, 1);
    d.v(0, 0) = 1.0;
    Matrix h(1, 1);
    h << 1e-5;
    const LuRates rates = lu_rates(h, d, lim);
    CHECK(rates.sinr_common(0) == doctest::Approx(432.62798971613254).epsilon(1e-12));
    CHECK(rates.r_common(0) == doctest::Approx(8.7603140722077288).epsilon(1e-12));
    CHECK(rates.r_private(0) == 0.0);
  }

  SUBCASE("noise monotonicity") {
    Rng rng(6);
    const Matrix h = random_channel(2, 3, rng);
    RsmaDecision d = random_decision(2, 3, rng);
    d.v(0, 0) = 1.0;  // nonzero common signal
    PowerLimits quiet = table_limits(2);
    PowerLimits loud = table_limits(2);
    loud.noise_lu = Vector::Constant(2, 1e-12);
    CHECK(lu_rates(h, d, quiet).r_common(0) > lu_rates(h, d, loud).r_common(0));
  }
}

TEST_CASE("eve rates") {
  PowerLimits lim = table_limits(2);
  Rng rng(8);
  Vector h_eve(3);
  h_eve << 2e-5, 1e-5, 3e-6;

  SUBCASE("silent transmitter") {
    const EveRates rates = eve_rates(h_eve, RsmaDecision::zero(2, 3), lim);
    CHECK(rates.r_common == 0.0);
    CHECK(rates.r_private.isZero());
  }

  SUBCASE("common stream only leaks nothing private") {
    RsmaDecision d = RsmaDecision::zero(2, 3);
    d.v(0, 0) = 1.0;
    const EveRates rates = eve_rates(h_eve, d, lim);
    CHECK(rates.r_common > 0.0);
    CHECK(rates.r_private.isZero());
  }
}

TEST_CASE("rates agree with the literal transcription") {
  Rng rng(9);
  PowerLimits lim = table_limits(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix h = random_channel(2, 4, rng);
    Vector h_eve(4);
    for (int l = 0; l < 4; ++l) h_eve(l) = std::pow(10.0, rng.uniform(-6, -4));
    const RsmaDecision d = random_decision(2, 4, rng);

    const LuRates lu = lu_rates(h, d, lim);
    const EveRates eve = eve_rates(h_eve, d, lim);
    const RateReport report = secrecy_and_see(lu, eve, d, lim);

    std::vector<std::vector<double>> h_raw(2, std::vector<double>(4));
    std::vector<std::vector<double>> v_raw(3, std::vector<double>(4));
    std::vector<double> h_eve_raw(4), dc_raw(4), c_raw(2), noise_raw(2);
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 4; ++l) h_raw[k][l] = h(k, l);
      c_raw[k] = d.c(k);
      noise_raw[k] = lim.noise_lu(k);
    }
    for (int i = 0; i < 3; ++i) {
      for (int l = 0; l < 4; ++l) v_raw[i][l] = d.v(i, l);
    }
    for (int l = 0; l < 4; ++l) {
      h_eve_raw[l] = h_eve(l);
      dc_raw[l] = d.dc_bias(l);
    }
    const testing::OracleRates expected = testing::oracle_rates(
        h_raw, h_eve_raw, v_raw, dc_raw, c_raw, noise_raw, lim.noise_eve, lim.u_led, lim.p_circuit);

    for (int k = 0; k < 2; ++k) {
      CHECK(testing::relative_diff(lu.r_common(k), expected.r_common[k]) < 1e-12);
      CHECK(testing::relative_diff(lu.r_private(k), expected.r_private[k]) < 1e-12);
      CHECK(testing::relative_diff(eve.r_private(k), expected.r_eve_private[k]) < 1e-12);
      CHECK(lu.r_common(k) >= 0.0);
      CHECK(lu.r_private(k) >= 0.0);
    }
    CHECK(testing::relative_diff(eve.r_common, expected.r_eve_common) < 1e-12);
    CHECK(testing::relative_diff(report.secrecy_total, expected.secrecy_total) < 1e-12);
    CHECK(testing::relative_diff(report.p_total, expected.p_total) < 1e-12);
    CHECK(testing::relative_diff(report.see, expected.see) < 1e-12);
    CHECK(report.secrecy_total >= 0.0);
  }
}

TEST_CASE("secrecy and efficiency") {
  PowerLimits lim = table_limits(2);

  SUBCASE("clamped to zero when the eavesdropper wins") {
    LuRates lu;
    lu.r_common = Vector::Zero(2);
    lu.r_private = Vector::Constant(2, 0.5);
    lu.sinr_common = lu.sinr_private = Vector::Zero(2);
    EveRates eve;
    eve.r_common = 5.0;
    eve.r_private = Vector::Constant(2, 2.0);
    eve.sinr_private = Vector::Zero(2);
    const RateReport report = secrecy_and_see(lu, eve, RsmaDecision::zero(2, 3), lim);
    CHECK(report.secrecy_total == 0.0);
    CHECK(report.see == 0.0);
  }

  SUBCASE("positive parts add up") {
    LuRates lu;
    lu.r_common = Vector::Constant(2, 3.0);
    lu.r_private.resize(2);
    lu.r_private << 3.0, 1.0;
    lu.sinr_common = lu.sinr_private = Vector::Zero(2);
    EveRates eve;
    eve.r_common = 0.0;
    eve.r_private.resize(2);
    eve.r_private << 1.0, 0.5;
    eve.sinr_private = Vector::Zero(2);
    RsmaDecision d = RsmaDecision::zero(2, 3);
    d.c = Vector::Constant(2, 1.0);
    const RateReport report = secrecy_and_see(lu, eve, d, lim);
    CHECK(report.secrecy_total == doctest::Approx(4.5));  // 2 + 2 + 0.5
    CHECK(report.r_total_per_lu(0) == doctest::Approx(4.0));
  }

  SUBCASE("efficiency scales inversely with power") {
    LuRates lu;
    lu.r_common = Vector::Constant(1, 4.0);
    lu.r_private = Vector::Constant(1, 2.0);
    lu.sinr_common = lu.sinr_private = Vector::Zero(1);
    EveRates eve;
    eve.r_common = 0.0;
    eve.r_private = Vector::Zero(1);
    eve.sinr_private = Vector::Zero(1);
    PowerLimits lim1 = table_limits(1);
    RsmaDecision d1 = RsmaDecision::zero(1, 2);
    const RateReport r1 = secrecy_and_see(lu, eve, d1, lim1);  // P = p_circuit = 2
    RsmaDecision d2 = d1;
    d2.dc_bias = Vector::Constant(2, 0.5);  // adds 2 W, doubles the power
    const RateReport r2 = secrecy_and_see(lu, eve, d2, lim1);
    CHECK(r2.p_total == doctest::Approx(2.0 * r1.p_total));
    CHECK(r2.see == doctest::Approx(0.5 * r1.see));
  }
}

TEST_CASE("feasibility verdicts") {
  PowerLimits lim = table_limits(2);
  const AlignmentState idle = AlignmentState::zero(3, 2, 2);

  SUBCASE("all-zero decision fails only qos") {
    const RsmaDecision d = RsmaDecision::zero(2, 2);
    LuRates lu;
    lu.r_common = lu.r_private = lu.sinr_common = lu.sinr_private = Vector::Zero(2);
    EveRates eve;
    eve.r_common = 0;
    eve.r_private = eve.sinr_private = Vector::Zero(2);
    const RateReport report = secrecy_and_see(lu, eve, d, lim);
    const ConstraintVerdicts v = feasibility(d, report, lim, idle);
    CHECK(!v.qos);
    CHECK(v.common_cap);
    CHECK(v.power);
    CHECK(v.linear);
    CHECK(v.alignment_rows);
    CHECK(v.c_nonneg);
    CHECK(v.delta_nonneg);
    CHECK(!v.all());
  }

  SUBCASE("common cap holds on the boundary") {
    RsmaDecision d = RsmaDecision::zero(2, 2);
    d.c << 1.5, 1.5;
    LuRates lu;
    lu.r_common = Vector::Constant(2, 3.0);  // sum c == min r_common exactly
    lu.r_private = Vector::Constant(2, 2.0);
    lu.sinr_common = lu.sinr_private = Vector::Zero(2);
    EveRates eve;
    eve.r_common = 0;
    eve.r_private = eve.sinr_private = Vector::Zero(2);
    d.dc_bias = Vector::Constant(2, 2.5);
    const RateReport report = secrecy_and_see(lu, eve, d, lim);
    const ConstraintVerdicts v = feasibility(d, report, lim, idle);
    CHECK(v.common_cap);
    CHECK(v.qos);  // 1.5 + 2.0 >= 2
    CHECK(v.all());
  }

  SUBCASE("verdicts are pure") {
    Rng rng(12);
    const RsmaDecision d = random_decision(2, 2, rng);
    const Matrix h = random_channel(2, 2, rng);
    const LuRates lu = lu_rates(h, d, lim);
    EveRates eve;
    eve.r_common = 0.1;
    eve.r_private = Vector::Constant(2, 0.1);
    eve.sinr_private = Vector::Zero(2);
    const RateReport report = secrecy_and_see(lu, eve, d, lim);
    const ConstraintVerdicts v1 = feasibility(d, report, lim, idle);
    const ConstraintVerdicts v2 = feasibility(d, report, lim, idle);
    CHECK(v1.qos == v2.qos);
    CHECK(v1.common_cap == v2.common_cap);
    CHECK(v1.power == v2.power);
    CHECK(v1.linear == v2.linear);
  }
}

TEST_CASE("exhaustive assignment search") {
  OpticalParams optics = OpticalParams::from_degrees(1.0, 1.5, 75.0, 60.0, 1e-4, 0.9);

  SUBCASE("no elements means a single configuration") {
    Scene scene;
    scene.leds = {Vec3(3, 3, 3)};
    scene.lus = {Vec3(3, 3, 0)};
    scene.eve = Vec3(5, 5, 0);
    const ChannelSet ch = build_channel_set(scene, optics);
    PowerLimits lim = table_limits(1);
    lim.qos = Vector::Zero(1);
    RsmaDecision d = RsmaDecision::zero(1, 1);
    d.v(0, 0) = 0.5;
    d.v(1, 0) = 0.5;
    d.dc_bias = Vector::Constant(1, 1.0);
    const OracleResult result = exhaustive_alignment_oracle(ch, d, lim);
    CHECK(result.configurations == 1);
    CHECK(result.feasible);
    const LuRates lu = lu_rates(ch.h_los_lu, d, lim);
    const EveRates eve = eve_rates(ch.h_los_eve, d, lim);
    CHECK(result.best_see == secrecy_and_see(lu, eve, d, lim).see);
  }

  SUBCASE("counts configurations") {
    Scene scene;
    scene.leds = {Vec3(3, 3, 3)};
    scene.irs_elements = {Vec3(0, 3, 1.5), Vec3(0, 3.5, 1.5)};
    scene.lus = {Vec3(2, 3, 0)};
    scene.eve = Vec3(5, 5, 0);
    const ChannelSet ch = build_channel_set(scene, optics);
    PowerLimits lim = table_limits(1);
    lim.qos = Vector::Zero(1);
    RsmaDecision d = RsmaDecision::zero(1, 1);
    d.v(0, 0) = 0.3;
    d.v(1, 0) = 0.3;
    d.dc_bias = Vector::Constant(1, 1.0);
    const OracleResult result = exhaustive_alignment_oracle(ch, d, lim);
    CHECK(result.configurations == 4);  // (1*1 + 1)^2
  }

  SUBCASE("beats random assignments") {
    Scene scene;
    scene.leds = {Vec3(2, 3, 3), Vec3(4, 3, 3)};
    scene.irs_elements = {Vec3(0, 2.8, 1.4), Vec3(0, 3.2, 1.4), Vec3(0, 3.0, 1.8)};
    scene.lus = {Vec3(2, 2.5, 0), Vec3(4, 3.5, 0)};
    scene.eve = Vec3(5.5, 5.5, 0);
    const ChannelSet ch = build_channel_set(scene, optics);
    PowerLimits lim = table_limits(2);
    lim.qos = Vector::Zero(2);
    RsmaDecision d = RsmaDecision::zero(2, 2);
    d.v << 0.2, 0.2, 0.3, 0.1, 0.1, 0.3;
    d.dc_bias = Vector::Constant(2, 1.5);
    const OracleResult result = exhaustive_alignment_oracle(ch, d, lim);
    REQUIRE(result.feasible);

    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      AlignmentState s = AlignmentState::zero(3, 2, 2);
      for (int n = 0; n < 3; ++n) {
        const int digit = rng.uniform_int(5);
        if (digit > 0) s.q(n, digit - 1) = 1;
      }
      const LuRates lu = lu_rates(effective_channel(ch, s), d, lim);
      const EveRates eve = eve_rates(ch.h_los_eve, d, lim);
      CHECK(result.best_see >= secrecy_and_see(lu, eve, d, lim).see);
    }
  }

  SUBCASE("guard rejects huge instances") {
    Scene scene;
    scene.leds = {Vec3(1.5, 2, 3), Vec3(3, 2, 3), Vec3(4.5, 2, 3)};
    scene.lus = {Vec3(2, 2.5, 0), Vec3(4, 3.5, 0)};
    scene.eve = Vec3(5, 5, 0);
    scene.irs_elements.assign(16, Vec3(0, 3, 1.5));
    for (int n = 0; n < 16; ++n) scene.irs_elements[n].y() = 1.0 + 0.25 * n;
    const ChannelSet ch = build_channel_set(scene, optics);
    PowerLimits lim = table_limits(2);
    const RsmaDecision d = RsmaDecision::zero(2, 3);
    CHECK_THROWS_AS(exhaustive_alignment_oracle(ch, d, lim), std::invalid_argument);
  }
}
