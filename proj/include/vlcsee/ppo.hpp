// SPDX-License-Identifier: Apache-2.0
//
// Clipped-surrogate policy optimization with dual sampling: every episode
// triggers an on-policy phase over the most recent batch and an off-policy
// phase over transitions drawn uniformly from a large replay pool.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vlcsee/policy.hpp"
#include "vlcsee/rollout.hpp"

namespace vlcsee {

struct Transition {
  Vector state;
  Vector action;  // raw pre-squash sample
  Vector next_state;
  double log_prob = 0;  // behavior log-probability at collection time
  double reward = 0;
  double value = 0;  // behavior value estimate at collection time
  bool done = false;
};

// FIFO ring buffer. The on-policy window is the most recent insertions;
// off-policy draws are uniform without replacement over everything held.
class ExperiencePool {
 public:
  explicit ExperiencePool(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_inserted() const { return inserted_; }

  // i = 0 is the newest transition.
  const Transition& recent(std::size_t i) const;

  std::vector<const Transition*> last(std::size_t n) const;
  std::vector<const Transition*> sample_uniform(std::size_t n, Rng& rng) const;

 private:
  std::vector<Transition> buffer_;
  std::size_t capacity_;
  std::size_t head_ = 0;  // next write position once full
  std::uint64_t inserted_ = 0;
};

// delta_t = r_t + gamma * V(s_{t+1}) - V(s_t); callers put 0 into
// next_values at terminal steps.
Vector td_errors(const Vector& rewards, const Vector& values, const Vector& next_values,
                 double gamma);

// Backward recursion A_t = delta_t + gamma * A_{t+1}, A_{T-1} = delta_{T-1}.
Vector gae(const Vector& deltas, double gamma);

// r_t + V(s_{t+1}) - V(s_t), undiscounted.
Vector traditional_advantage(const Vector& rewards, const Vector& values,
                             const Vector& next_values);

// Batch mean of min(rho * A, clip(rho, 1 - eps, 1 + eps) * A).
double clip_surrogate(const Vector& ratios, const Vector& advantages, double epsilon);

// Advantages and value targets for one sampled batch, computed from the
// current critic at sampling time. Contiguous windows (the on-policy
// episode) run the backward recursion across steps; scattered replay
// draws use the one-step estimate, which the recursion reduces to at
// gamma = 0 anyway.
struct AdvantageBatch {
  Vector advantages;
  Vector targets;     // advantage + V(s)
  bool normalized = false;
};

AdvantageBatch advantage_batch(const std::vector<const Transition*>& batch, const Mlp& value_net,
                               double gamma, bool contiguous, bool normalize);

// Monotone conditioning applied to states before they reach the networks;
// sign(x) * log1p(|x|) keeps the huge SINR entries in a trainable range.
double symlog(double x);
Vector symlog(const Vector& v);
Matrix symlog(const Matrix& m);

struct TrainerConfig {
  double lr_actor = 2.5e-4;
  double lr_critic = 2.5e-4;
  int epochs_on = 10;
  int epochs_off = 3;
  int batch_on = 2048;  // also the episode length
  int batch_off = 256;
  std::size_t pool_capacity = 40960;
  double gamma = 0.0;
  double clip_epsilon = 0.2;
  std::int64_t total_steps = 200000;
  double t_decay = 0;  // <= 0 means total_steps
  bool advantage_norm = true;
  int hidden = 256;
  double log_std_init = -0.6931471805599453;  // log(0.5)
  std::string abort_checkpoint_path;          // written if a loss turns non-finite

  double decay_horizon() const { return t_decay > 0 ? t_decay : static_cast<double>(total_steps); }
  double lr_at(double lr0, std::int64_t step) const {
    return lr0 * std::pow(10.0, -static_cast<double>(step) / decay_horizon());
  }
};

struct UpdateLogRow {
  std::int64_t step = 0;  // env steps completed when the row was produced
  int update = 0;         // episode / update-round counter
  int phase = 0;          // 0 = on-policy epoch, 1 = off-policy epoch
  int epoch = 0;          // 1-based within the phase
  double avg_reward = 0;
  double avg_see = 0;
  Vector r_lu;  // mean total rate per user over the episode
  double r_eve_common = 0;
  double r_eve_private = 0;
  double actor_loss = 0;
  double critic_loss = 0;
  double lr = 0;
  int viol_power = 0;
  int viol_common = 0;
  int viol_qos = 0;
  int viol_linear = 0;
};

struct TrainResult {
  std::vector<UpdateLogRow> rows;
  double best_reward = 0;
  Vector best_action;
  double final_avg_reward = 0;  // last episode mean
  double final_avg_see = 0;
  // Trained networks (shared so the result stays copyable).
  std::shared_ptr<GaussianPolicy> policy;
  std::shared_ptr<Mlp> value_net;
};

// Loss helpers shared by the trainer and its gradient tests. Both return
// the descended quantity; gradient outputs are optional.
double actor_loss_and_grads(const GaussianPolicy& policy, const Matrix& states,
                            const Matrix& actions, const Vector& behavior_log_probs,
                            const Vector& advantages, double clip_epsilon,
                            MlpGrads* net_grads = nullptr, Vector* log_std_grads = nullptr);
double critic_loss_and_grads(const Mlp& value_net, const Matrix& states, const Vector& targets,
                             MlpGrads* grads = nullptr);

// Runs the full training loop on `env`. Deterministic per (config, seed).
// epochs_off = 0 degrades to single-sampling updates.
TrainResult train_ds_ppo(RolloutEnv& env, const TrainerConfig& cfg, std::uint64_t seed);

}  // namespace vlcsee
