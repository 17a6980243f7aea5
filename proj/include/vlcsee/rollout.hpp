// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vlcsee/linalg.hpp"

namespace vlcsee {

// Per-step quantities surfaced for logging. Environments without a radio
// model leave the rate fields empty.
struct StepStats {
  double see = 0;
  Vector r_total_per_lu;
  double r_eve_common = 0;
  double r_eve_private_mean = 0;
  bool gate_power = true;
  bool gate_common = true;
  bool gate_qos = true;
  bool gate_linear = true;
  bool decode_failed = false;
};

struct StepResult {
  Vector next_state;
  double reward = 0;
  StepStats stats;
};

// Environment interface driven by the trainer.
class RolloutEnv {
 public:
  virtual ~RolloutEnv() = default;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual Vector reset() = 0;
  virtual StepResult step(const Vector& raw_action) = 0;

  // Pre-squash action around which exploration should start; seeds the
  // policy's output bias. Defaults to the squash midpoints.
  virtual Vector initial_action_bias() const { return Vector::Zero(action_dim()); }
};

}  // namespace vlcsee
