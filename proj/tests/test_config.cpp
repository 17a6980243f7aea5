// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "vlcsee/config.hpp"

using namespace vlcsee;

TEST_CASE("empty config equals the reference defaults") {
  const ExperimentConfig c = parse_config("");
  CHECK(c.scenario.p_max == 20.0);
  CHECK(c.scenario.p_circuit == 2.0);
  CHECK(c.scenario.u_led == 2.0);
  CHECK(c.scenario.i_min == 0.0);
  CHECK(c.scenario.i_max == 5.0);
  CHECK(c.scenario.qos == 2.0);
  CHECK(c.scenario.noise_lu == 1e-13);
  CHECK(c.scenario.noise_eve == 1e-13);
  CHECK(c.scenario.rho == 0.9);
  CHECK(c.scenario.g_of == 1.0);
  CHECK(c.scenario.kappa == 1.5);
  CHECK(c.scenario.psi_fov_deg == 75.0);
  CHECK(c.scenario.omega_half_deg == 60.0);
  CHECK(c.scenario.area_pd == 1e-4);
  CHECK(c.scenario.n_irs == 16);
  CHECK(c.scenario.k_lus == 2);
  REQUIRE(c.scenario.leds.size() == 6);
  CHECK(c.scenario.leds[0] == Vec3(1.5, 2, 3));
  CHECK(c.scenario.leds[5] == Vec3(4.5, 4, 3));
  CHECK(c.scenario.room == Vec3(6, 6, 3));

  CHECK(c.trainer.lr_actor == 2.5e-4);
  CHECK(c.trainer.lr_critic == 2.5e-4);
  CHECK(c.trainer.epochs_on == 10);
  CHECK(c.trainer.epochs_off == 3);
  CHECK(c.trainer.batch_on == 2048);
  CHECK(c.trainer.batch_off == 256);
  CHECK(c.trainer.pool_capacity == 40960);
  CHECK(c.trainer.gamma == 0.0);
  CHECK(c.trainer.clip_epsilon == 0.2);
  CHECK(c.trainer.advantage_norm);
  CHECK(c.trainer.hidden == 256);
}

TEST_CASE("validation failures") {
  CHECK_THROWS_AS(parse_config("[scene]\nk_lus = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scene]\nnot_a_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nowhere]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scene]\nk_lus == 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nseeds =\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[trainer]\nclip_epsilon = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sweep]\naxis = banana\nvalues = 1 2\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/no/such/file.cfg"), ConfigError);

  // errors carry the line number
  try {
    parse_config("[scene]\n\nk_lus = zero\n", "test.cfg");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("test.cfg:3") != std::string::npos);
  }
}

TEST_CASE("round trip through serialization") {
  const std::string text =
      "[scene]\n"
      "n_irs = 8\n"
      "k_lus = 1\n"
      "lus = 2.25,3.5,0\n"
      "eve = 5,5,0\n"
      "[power]\n"
      "p_max = 30\n"
      "[trainer]\n"
      "steps = 4096\n"
      "gamma = 0.9\n"
      "[run]\n"
      "seeds = 7 8\n"
      "out = /tmp/x\n"
      "[sweep]\n"
      "axis = p_max\n"
      "values = 10 20 30\n"
      "baselines = ds_ppo ppo eps_greedy mrt_only ds_ppo+sdma ds_ppo+noirs\n";
  const ExperimentConfig c = parse_config(text);
  CHECK(c.scenario.n_irs == 8);
  CHECK(c.scenario.lus.size() == 1);
  CHECK(c.baselines.size() == 6);
  CHECK(c.baselines[4].sdma);
  CHECK(c.baselines[5].irs_off);
  CHECK(c.baselines[5].label() == "ds_ppo+noirs");

  const std::string canon = serialize_config(c);
  const ExperimentConfig reparsed = parse_config(canon);
  CHECK(serialize_config(reparsed) == canon);
  CHECK(config_hash(reparsed) == config_hash(c));

  // the hash reacts to any field change
  ExperimentConfig tweaked = c;
  tweaked.scenario.p_max = 31.0;
  CHECK(config_hash(tweaked) != config_hash(c));
}

TEST_CASE("scene building") {
  ExperimentConfig c = default_config();

  SUBCASE("reference grid layout") {
    const Scene scene = build_scene(c, 1);
    CHECK(scene.leds.size() == 6);
    CHECK(scene.irs_elements.size() == 16);
    for (const auto& e : scene.irs_elements) {
      CHECK(e.x() == 0.0);
      CHECK(e.y() >= 2.5);
      CHECK(e.y() <= 3.5);
      CHECK(e.z() >= 1.0);
      CHECK(e.z() <= 2.0);
    }
    CHECK(scene.lus.size() == 2);
  }

  SUBCASE("drawn positions are deterministic and separated") {
    const Scene a = build_scene(c, 5);
    const Scene b = build_scene(c, 5);
    const Scene other = build_scene(c, 6);
    CHECK(a.lus[0] == b.lus[0]);
    CHECK(a.eve == b.eve);
    CHECK(a.lus[0] != other.lus[0]);
    for (const auto& lu : a.lus) {
      CHECK(lu.x() >= 0.5);
      CHECK(lu.x() <= 5.5);
      CHECK(lu.z() == 0.0);
      CHECK((lu - a.eve).norm() >= 0.5);
    }
    CHECK((a.lus[0] - a.lus[1]).norm() >= 0.5);
  }

  SUBCASE("explicit positions are respected") {
    c.scenario.lus = {Vec3(1, 1, 0), Vec3(5, 5, 0)};
    c.scenario.eve = Vec3(3, 3, 0);
    const Scene scene = build_scene(c, 9);
    CHECK(scene.lus[0] == Vec3(1, 1, 0));
    CHECK(scene.eve == Vec3(3, 3, 0));
  }
}

TEST_CASE("axis application") {
  const ExperimentConfig base = default_config();

  ExperimentConfig n = with_axis_value(base, "n_irs", 8);
  CHECK(n.scenario.n_irs == 8);
  CHECK(build_scene(n, 1).irs_elements.size() == 8);

  ExperimentConfig k = with_axis_value(base, "k_lus", 3);
  CHECK(k.scenario.k_lus == 3);
  CHECK(build_limits(k).qos.size() == 3);

  ExperimentConfig p = with_axis_value(base, "p_max", 40);
  CHECK(build_limits(p).p_max == 40.0);

  ExperimentConfig q = with_axis_value(base, "qos", 4);
  CHECK(build_limits(q).qos(0) == 4.0);

  ExperimentConfig lr = with_axis_value(base, "lr", 1e-4);
  CHECK(lr.trainer.lr_actor == 1e-4);
  CHECK(lr.trainer.lr_critic == 1e-4);

  CHECK_THROWS_AS(with_axis_value(base, "nope", 1), ConfigError);
}

TEST_CASE("optics and limits builders") {
  const ExperimentConfig c = default_config();
  const OpticalParams optics = build_optics(c);
  CHECK(optics.lambert_m == 1.0);
  const PowerLimits lim = build_limits(c);
  CHECK(lim.qos.size() == 2);
  CHECK(lim.qos(0) == 2.0);
  CHECK(lim.noise_eve == 1e-13);
}
