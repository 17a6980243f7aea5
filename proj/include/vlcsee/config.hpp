// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: a sectioned key-value file with defaults for
// the reference indoor scenario. Unknown sections or keys are hard errors.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlcsee/geometry.hpp"
#include "vlcsee/ppo.hpp"
#include "vlcsee/rsma.hpp"

namespace vlcsee {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BaselineKind { kDsPpo, kPpo, kEpsGreedy, kMrtOnly };

struct BaselineSpec {
  BaselineKind kind = BaselineKind::kDsPpo;
  bool sdma = false;
  bool irs_off = false;
  double epsilon = 0.1;  // exploration rate for the greedy searcher

  std::string label() const;
  static BaselineSpec parse(const std::string& token);  // e.g. "ds_ppo+sdma+noirs"
};

struct ScenarioConfig {
  Vec3 room = Vec3(6, 6, 3);
  std::vector<Vec3> leds;          // default: six ceiling LEDs
  int n_irs = 16;
  std::vector<Vec3> irs_elements;  // empty: wall grid built from n_irs
  int k_lus = 2;
  std::vector<Vec3> lus;           // empty: drawn on the floor per seed
  std::optional<Vec3> eve;         // empty: drawn on the floor per seed

  // Optics
  double g_of = 1.0;
  double kappa = 1.5;
  double psi_fov_deg = 75.0;
  double omega_half_deg = 60.0;
  double area_pd = 1e-4;
  double rho = 0.9;

  // Power and QoS
  double p_max = 20.0;
  double p_circuit = 2.0;
  double u_led = 2.0;
  double i_min = 0.0;
  double i_max = 5.0;
  double qos = 2.0;
  double noise_lu = 1e-13;
  double noise_eve = 1e-13;
};

struct SweepAxis {
  std::string name;  // one of: n_irs, k_lus, p_max, qos, lr
  std::vector<double> values;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  TrainerConfig trainer;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::string out_dir = "runs";
  int workers = 2;
  bool audit = false;
  SweepAxis sweep;                       // empty name: no sweep configured
  std::vector<BaselineSpec> baselines;   // default: ds_ppo only

  void validate() const;  // throws ConfigError listing every violation
};

ExperimentConfig default_config();

// Parses file contents; `origin` names the source in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

// Canonical serialization; parse(serialize(c)) == c field for field.
std::string serialize_config(const ExperimentConfig& config);

// FNV-1a over the canonical serialization, hex.
std::string config_hash(const ExperimentConfig& config);

// Scenario builders. Positions not pinned in the config are drawn on the
// floor with at least 0.5 m clearance from the walls and from each other,
// deterministically from the seed.
Scene build_scene(const ExperimentConfig& config, std::uint64_t seed);
OpticalParams build_optics(const ExperimentConfig& config);
PowerLimits build_limits(const ExperimentConfig& config);

// Returns a copy with the sweep axis pinned to `value`.
ExperimentConfig with_axis_value(const ExperimentConfig& config, const std::string& axis,
                                 double value);

}  // namespace vlcsee
