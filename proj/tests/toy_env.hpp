// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vlcsee/rollout.hpp"

namespace vlcsee::testing {

// Stateless bandit: reward = -||a - target||^2, constant observation.
class QuadraticBandit final : public RolloutEnv {
 public:
  explicit QuadraticBandit(Vector target) : target_(std::move(target)) {
    state_ = Vector(4);
    state_ << 1.0, 0.5, -0.5, 0.25;
  }

  int state_dim() const override { return static_cast<int>(state_.size()); }
  int action_dim() const override { return static_cast<int>(target_.size()); }

  Vector reset() override { return state_; }

  StepResult step(const Vector& action) override {
    StepResult out;
    out.next_state = state_;
    out.reward = -(action - target_).squaredNorm();
    return out;
  }

  const Vector& target() const { return target_; }

 private:
  Vector target_;
  Vector state_;
};

}  // namespace vlcsee::testing
