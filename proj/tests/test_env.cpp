// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "rate_oracle.hpp"
#include "vlcsee/env.hpp"
#include "vlcsee/rng.hpp"

using namespace vlcsee;

namespace {

OpticalParams table_optics() { return OpticalParams::from_degrees(1.0, 1.5, 75.0, 60.0, 1e-4, 0.9); }

PowerLimits table_limits(int num_lus) {
  PowerLimits lim;
  lim.qos = Vector::Constant(num_lus, 2.0);
  lim.noise_lu = Vector::Constant(num_lus, 1e-13);
  return lim;
}

// Channel container with hand-picked gains (no geometry behind it).
ChannelSet manual_channels(const Matrix& h_lu, const Vector& h_eve) {
  ChannelSet ch;
  ch.h_los_lu = h_lu;
  ch.h_los_eve = h_eve;
  ch.h_nlos_eve = Vector::Zero(h_eve.size());
  return ch;
}

Scene fixed_scene() {
  Scene scene;
  scene.leds = {Vec3(1.5, 2, 3), Vec3(3, 2, 3), Vec3(4.5, 2, 3),
                Vec3(1.5, 4, 3), Vec3(3, 4, 3), Vec3(4.5, 4, 3)};
  scene.irs_elements = {Vec3(0, 2.875, 1.375), Vec3(0, 3.125, 1.375),
                        Vec3(0, 2.875, 1.625), Vec3(0, 3.125, 1.625)};
  scene.lus = {Vec3(2.0, 2.5, 0), Vec3(4.0, 3.5, 0)};
  scene.eve = Vec3(5.2, 5.2, 0);
  return scene;
}

}  // namespace

TEST_CASE("action and state layouts") {
  const ActionLayout a{16, 6, 2};
  CHECK(a.dim() == 16 * 6 * 2 + 2 * 2 + 6 + 1);  // 203
  const StateLayout s{a};
  CHECK(s.dim() == 211);
  CHECK(s.sinr_count() == 7);
}

TEST_CASE("decode squashing") {
  const Matrix h = (Matrix(2, 2) << 1.0, 0.0, 0.0, 2.0).finished();
  const ChannelSet ch = manual_channels(h, Vector::Constant(2, 1e-6));
  const PowerLimits lim = table_limits(2);
  const ActionLayout layout{0, 2, 2};

  SUBCASE("neutral logits hit the midpoints") {
    const DecodedAction d = decode_action(Vector::Zero(layout.dim()), ch, lim);
    for (int i = 0; i <= 2; ++i) {
      CHECK(d.action_block(i) == doctest::Approx(std::sqrt(20.0) / 2.0).epsilon(1e-15));
    }
    CHECK(d.decision.dc_bias(0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(d.decision.dc_bias(1) == doctest::Approx(2.5).epsilon(1e-15));
  }

  SUBCASE("zero-forcing on a diagonal channel") {
    const DecodedAction d = decode_action(Vector::Zero(layout.dim()), ch, lim);
    // pinv = [[1,0],[0,0.5]] scaled by 1/sqrt(1.25); user 1 hears nothing
    // of user 2's stream
    const Vector h1 = h.row(0).transpose();
    const Vector v2 = d.decision.v.row(2).transpose();
    CHECK(std::abs(h1.dot(v2)) <= 1e-12 * h1.norm() * v2.norm());
    const Vector v1_dir = d.decision.v.row(1).transpose().normalized();
    CHECK(v1_dir(0) == doctest::Approx(1.0));
    // joint normalization: direction norms are 1/sqrt(1.25) and 0.5/sqrt(1.25)
    const double p1 = std::sqrt(20.0) / 2.0;
    CHECK(d.decision.v.row(1).norm() == doctest::Approx(p1 / std::sqrt(1.25)));
    CHECK(d.decision.v.row(2).norm() == doctest::Approx(p1 * 0.5 / std::sqrt(1.25)));
  }

  SUBCASE("matched common direction") {
    Rng rng(4);
    Vector raw(layout.dim());
    for (int i = 0; i < raw.size(); ++i) raw(i) = rng.uniform(-2, 2);
    const DecodedAction d = decode_action(raw, ch, lim);
    const Vector h_sum = (h.row(0) + h.row(1)).transpose();
    const Vector v0 = d.decision.v.row(0).transpose();
    const double cosine = v0.dot(h_sum) / (v0.norm() * h_sum.norm());
    CHECK(cosine == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("common rate split stays within the worst common rate") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      Vector raw(layout.dim());
      for (int i = 0; i < raw.size(); ++i) raw(i) = rng.uniform(-4, 4);
      const DecodedAction d = decode_action(raw, ch, lim);
      CHECK(d.decision.c.sum() <= 2.0 * d.min_common_rate + 1e-12);
      for (int k = 0; k < 2; ++k) {
        CHECK(d.decision.c(k) >= 0.0);
        CHECK(d.decision.c(k) <= d.min_common_rate + 1e-12);
      }
      for (int i = 0; i <= 2; ++i) {
        CHECK(d.action_block(i) >= 0.0);
        CHECK(d.action_block(i) <= std::sqrt(lim.p_max));
      }
      for (int l = 0; l < 2; ++l) {
        CHECK(d.decision.dc_bias(l) >= 0.0);
        CHECK(d.decision.dc_bias(l) <= lim.i_max);
      }
    }
  }

  SUBCASE("rank deficiency raises") {
    Matrix bad(2, 2);
    bad << 1e-5, 2e-5, 1e-5, 2e-5;  // identical rows
    const ChannelSet broken = manual_channels(bad, Vector::Constant(2, 1e-6));
    CHECK_THROWS_AS(decode_action(Vector::Zero(layout.dim()), broken, lim),
                    RankDeficientChannel);
  }

  SUBCASE("wrong length raises") {
    CHECK_THROWS_AS(decode_action(Vector::Zero(layout.dim() + 1), ch, lim),
                    std::invalid_argument);
  }
}

TEST_CASE("zero-forcing orthogonality on random channels") {
  Rng rng(19);
  const PowerLimits lim = table_limits(2);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix h(2, 6);
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 6; ++l) h(k, l) = std::pow(10.0, rng.uniform(-6, -4));
    }
    const ChannelSet ch = manual_channels(h, Vector::Constant(6, 1e-6));
    const ActionLayout layout{0, 6, 2};
    const DecodedAction d = decode_action(Vector::Zero(layout.dim()), ch, lim);
    for (int k = 0; k < 2; ++k) {
      for (int j = 0; j < 2; ++j) {
        if (j == k) continue;
        const Vector hk = h.row(k).transpose();
        const Vector vj = d.decision.v.row(j + 1).transpose();
        CHECK(std::abs(hk.dot(vj)) < 1e-9 * hk.norm() * vj.norm());
      }
    }
  }
}

TEST_CASE("build_state layout") {
  const StateLayout layout{ActionLayout{16, 6, 2}};

  SUBCASE("dimension matches the reference scene") {
    CHECK(layout.dim() == 211);
  }

  SUBCASE("zero blocks give the zero vector") {
    const Vector s = build_state(Vector::Zero(layout.action.dim()),
                                 Vector::Zero(layout.sinr_count()), 0.0, layout);
    CHECK(s.isZero());
    CHECK(s.size() == layout.dim());
  }

  SUBCASE("slicing recovers every block") {
    Rng rng(21);
    Vector action(layout.action.dim()), sinr(layout.sinr_count());
    for (int i = 0; i < action.size(); ++i) action(i) = rng.uniform();
    for (int i = 0; i < sinr.size(); ++i) sinr(i) = rng.uniform();
    const double r = rng.uniform();
    const Vector s = build_state(action, sinr, r, layout);
    CHECK(s.segment(0, action.size()) == action);
    CHECK(s.segment(layout.sinr_offset(), sinr.size()) == sinr);
    CHECK(s(layout.reward_offset()) == r);
  }

  SUBCASE("length mismatch raises") {
    CHECK_THROWS_AS(build_state(Vector::Zero(3), Vector::Zero(layout.sinr_count()), 0.0, layout),
                    std::invalid_argument);
  }
}

TEST_CASE("gated reward") {
  RateReport report;
  report.see = 0.37;
  ConstraintVerdicts v;
  v.power = v.common_cap = v.qos = v.linear = true;

  CHECK(reward(report, v) == 0.37);
  v.power = false;
  CHECK(reward(report, v) == 0.0);
  v.power = true;
  v.linear = false;
  CHECK(reward(report, v) == 0.0);
}

TEST_CASE("environment stepping") {
  VlcEnv env(fixed_scene(), table_optics(), table_limits(2), DecodeOptions{});
  const Vector s0 = env.reset();
  CHECK(s0.isZero());
  CHECK(env.state_dim() == 4 * 6 * 2 + 5 * 2 + 6 + 3);

  SUBCASE("deterministic and consistent with the rate stack") {
    Rng rng(31);
    Vector raw(env.action_dim());
    for (int i = 0; i < raw.size(); ++i) raw(i) = rng.uniform(-2, 2);

    const StepResult r1 = env.step(raw);
    env.reset();
    const StepResult r2 = env.step(raw);
    CHECK(r1.reward == r2.reward);
    CHECK(r1.next_state == r2.next_state);

    // Recompute the reward through the literal transcription.
    const DecodedAction& d = env.last_decoded();
    const Matrix h = effective_channel(env.channels(), d.alignment);
    std::vector<std::vector<double>> h_raw(2, std::vector<double>(6));
    std::vector<std::vector<double>> v_raw(3, std::vector<double>(6));
    std::vector<double> h_eve_raw(6), dc_raw(6), c_raw(2), noise_raw(2);
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 6; ++l) h_raw[k][l] = h(k, l);
      c_raw[k] = d.decision.c(k);
      noise_raw[k] = 1e-13;
    }
    for (int i = 0; i < 3; ++i) {
      for (int l = 0; l < 6; ++l) v_raw[i][l] = d.decision.v(i, l);
    }
    for (int l = 0; l < 6; ++l) {
      h_eve_raw[l] = env.channels().h_los_eve(l);
      dc_raw[l] = d.decision.dc_bias(l);
    }
    const testing::OracleRates expected =
        testing::oracle_rates(h_raw, h_eve_raw, v_raw, dc_raw, c_raw, noise_raw, 1e-13, 2.0, 2.0);

    bool gates = expected.p_total <= 20.0;
    double sum_c = c_raw[0] + c_raw[1];
    gates = gates && sum_c <= std::min(expected.r_common[0], expected.r_common[1]);
    for (int k = 0; k < 2; ++k) gates = gates && c_raw[k] + expected.r_private[k] >= 2.0;
    for (int l = 0; l < 6; ++l) {
      double amp = 0;
      for (int i = 0; i < 3; ++i) amp += std::abs(v_raw[i][l]);
      gates = gates && amp <= std::min(dc_raw[l], 5.0 - dc_raw[l]);
    }
    const double expected_reward = gates ? expected.see : 0.0;
    CHECK(testing::relative_diff(r1.reward, expected_reward) < 1e-12);
  }

  SUBCASE("neutral logits violate the power budget") {
    const StepResult r = env.step(Vector::Zero(env.action_dim()));
    CHECK(r.reward == 0.0);
    CHECK(!r.stats.gate_power);
    // 5 W on the unit common direction, 5 W shared by the jointly
    // normalized private columns, 2 V * 15 A of bias, 2 W circuit
    CHECK(env.last_report().p_total == doctest::Approx(42.0).epsilon(1e-12));
  }

  SUBCASE("linear-region violation zeroes the reward") {
    Vector raw = Vector::Zero(env.action_dim());
    // large beam powers, dc forced tiny: margins go negative
    for (int i = 0; i < 3; ++i) raw(i) = 3.0;
    for (int l = 0; l < 6; ++l) raw(3 + l) = -3.0;
    const StepResult r = env.step(raw);
    CHECK(!r.stats.gate_linear);
    CHECK(r.reward == 0.0);
  }
}

TEST_CASE("decode failure inside step") {
  Scene scene = fixed_scene();
  scene.lus[1] = scene.lus[0];  // duplicate users: dependent channel rows
  VlcEnv env(scene, table_optics(), table_limits(2), DecodeOptions{});
  env.reset();
  Vector raw = Vector::Zero(env.action_dim());
  const StepResult first = env.step(raw);
  CHECK(first.stats.decode_failed);
  CHECK(first.reward == 0.0);

  // SINR block carries over from the previous state (zeros here)
  const StateLayout& layout = env.state_layout();
  CHECK(first.next_state.segment(layout.sinr_offset(), layout.sinr_count()).isZero());
}

TEST_CASE("ablations") {
  const DecodeOptions sdma_opt = apply_ablation(DecodeOptions{}, true, false);
  const DecodeOptions noirs_opt = apply_ablation(DecodeOptions{}, false, true);
  const DecodeOptions both = apply_ablation(sdma_opt, false, true);
  CHECK(sdma_opt.sdma);
  CHECK(noirs_opt.irs_off);
  CHECK(both.sdma);
  CHECK(both.irs_off);

  SUBCASE("sdma removes the common stream") {
    VlcEnv env(fixed_scene(), table_optics(), table_limits(2), sdma_opt);
    env.reset();
    Rng rng(41);
    Vector raw(env.action_dim());
    for (int i = 0; i < raw.size(); ++i) raw(i) = rng.uniform(-3, 3);
    env.step(raw);
    CHECK(env.last_decoded().decision.v.row(0).isZero());
    CHECK(env.last_decoded().decision.c.isZero());
    CHECK(env.last_report().r_common.isZero());
    CHECK(env.last_report().r_eve_common == 0.0);
  }

  SUBCASE("reflector off keeps the bare channel") {
    VlcEnv env(fixed_scene(), table_optics(), table_limits(2), noirs_opt);
    env.reset();
    Rng rng(42);
    Vector raw(env.action_dim());
    for (int i = 0; i < raw.size(); ++i) raw(i) = rng.uniform(-3, 3);
    env.step(raw);
    CHECK(env.last_decoded().alignment.q.isZero());
    const Matrix h = effective_channel(env.channels(), env.last_decoded().alignment);
    CHECK(h == env.channels().h_los_lu);
  }
}

TEST_CASE("audit records feasible steps") {
  PowerLimits lim = table_limits(2);
  lim.qos = Vector::Zero(2);  // trivially satisfied
  VlcEnv env(fixed_scene(), table_optics(), lim, DecodeOptions{});
  env.enable_audit(true);
  env.reset();

  // small beams, small dc: inside the budget and the linear region
  Vector raw = Vector::Zero(env.action_dim());
  for (int i = 0; i < 3; ++i) raw(i) = -2.5;
  for (int l = 0; l < 6; ++l) raw(3 + l) = -1.0;
  const StepResult r = env.step(raw);
  REQUIRE(r.reward > 0.0);
  REQUIRE(env.audit().size() == 1);
  CHECK(env.audit()[0].reward == r.reward);
  CHECK(env.audit()[0].step == 1);

  env.enable_audit(false);
  env.step(raw);
  CHECK(env.audit().size() == 1);
}
