// SPDX-License-Identifier: Apache-2.0
#include "vlcsee/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace vlcsee {

ExperiencePool::ExperiencePool(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ExperiencePool: capacity must be positive");
  buffer_.reserve(capacity);
}

void ExperiencePool::push(Transition t) {
  if (buffer_.size() < capacity_) {
    buffer_.push_back(std::move(t));
  } else {
    buffer_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  ++inserted_;
}

const Transition& ExperiencePool::recent(std::size_t i) const {
  if (i >= buffer_.size()) throw std::out_of_range("ExperiencePool::recent");
  if (buffer_.size() < capacity_) return buffer_[buffer_.size() - 1 - i];
  const std::size_t newest = (head_ + capacity_ - 1) % capacity_;
  return buffer_[(newest + capacity_ - i) % capacity_];
}

std::vector<const Transition*> ExperiencePool::last(std::size_t n) const {
  n = std::min(n, buffer_.size());
  std::vector<const Transition*> out(n);
  for (std::size_t i = 0; i < n; ++i) out[n - 1 - i] = &recent(i);  // oldest first
  return out;
}

std::vector<const Transition*> ExperiencePool::sample_uniform(std::size_t n, Rng& rng) const {
  n = std::min(n, buffer_.size());
  std::vector<std::size_t> idx(buffer_.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: draws without replacement.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(idx.size() - i)));
    std::swap(idx[i], idx[j]);
  }
  std::vector<const Transition*> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = &buffer_[idx[i]];
  return out;
}

Vector td_errors(const Vector& rewards, const Vector& values, const Vector& next_values,
                 double gamma) {
  if (rewards.size() != values.size() || rewards.size() != next_values.size()) {
    throw std::invalid_argument("td_errors: length mismatch");
  }
  return rewards + gamma * next_values - values;
}

Vector gae(const Vector& deltas, double gamma) {
  if (deltas.size() == 0) throw std::invalid_argument("gae: empty input");
  Vector adv(deltas.size());
  adv(deltas.size() - 1) = deltas(deltas.size() - 1);
  for (Eigen::Index t = deltas.size() - 2; t >= 0; --t) {
    adv(t) = deltas(t) + gamma * adv(t + 1);
  }
  return adv;
}

Vector traditional_advantage(const Vector& rewards, const Vector& values,
                             const Vector& next_values) {
  if (rewards.size() != values.size() || rewards.size() != next_values.size()) {
    throw std::invalid_argument("traditional_advantage: length mismatch");
  }
  return rewards + next_values - values;
}

double clip_surrogate(const Vector& ratios, const Vector& advantages, double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("clip_surrogate: epsilon must lie in (0, 1)");
  }
  if (ratios.size() != advantages.size() || ratios.size() == 0) {
    throw std::invalid_argument("clip_surrogate: length mismatch");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < ratios.size(); ++i) {
    const double clipped = std::clamp(ratios(i), 1.0 - epsilon, 1.0 + epsilon);
    total += std::min(ratios(i) * advantages(i), clipped * advantages(i));
  }
  return total / static_cast<double>(ratios.size());
}

namespace {

Vector normalized(const Vector& advantages, bool enabled) {
  if (!enabled || advantages.size() < 2) return advantages;
  const double mean = advantages.mean();
  const double var = (advantages.array() - mean).square().mean();
  return (advantages.array() - mean) / (std::sqrt(var) + 1e-8);
}

}  // namespace

AdvantageBatch advantage_batch(const std::vector<const Transition*>& batch, const Mlp& value_net,
                               double gamma, bool contiguous, bool normalize) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  Matrix states(n, batch.front()->state.size());
  Matrix next_states(n, batch.front()->state.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    states.row(i) = symlog(batch[static_cast<std::size_t>(i)]->state).transpose();
    next_states.row(i) = symlog(batch[static_cast<std::size_t>(i)]->next_state).transpose();
  }
  const Vector values = value_net.forward_batch(states).col(0);
  const Vector next_raw = value_net.forward_batch(next_states).col(0);

  Vector rewards(n), next_values(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = *batch[static_cast<std::size_t>(i)];
    rewards(i) = t.reward;
    next_values(i) = t.done ? 0.0 : next_raw(i);
  }
  const Vector deltas = td_errors(rewards, values, next_values, gamma);

  AdvantageBatch out;
  if (contiguous) {
    // backward recursion over the window, restarted at episode ends
    out.advantages.resize(n);
    double carry = 0.0;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      const bool terminal = batch[static_cast<std::size_t>(i)]->done || i == n - 1;
      carry = deltas(i) + (terminal ? 0.0 : gamma * carry);
      out.advantages(i) = carry;
    }
  } else {
    out.advantages = deltas;
  }
  out.targets = out.advantages + values;
  out.advantages = normalized(out.advantages, normalize);
  out.normalized = normalize;
  return out;
}

double symlog(double x) { return x >= 0 ? std::log1p(x) : -std::log1p(-x); }

Vector symlog(const Vector& v) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = symlog(v(i));
  return out;
}

Matrix symlog(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = symlog(m(i, j));
  }
  return out;
}

double actor_loss_and_grads(const GaussianPolicy& policy, const Matrix& states,
                            const Matrix& actions, const Vector& behavior_log_probs,
                            const Vector& advantages, double clip_epsilon, MlpGrads* net_grads,
                            Vector* log_std_grads) {
  const Eigen::Index batch = states.rows();
  MlpCache cache;
  const Matrix means = policy.net.forward_batch(states, net_grads ? &cache : nullptr);
  const Vector log_probs = policy.log_prob_batch(means, actions);
  const Vector ratios = (log_probs - behavior_log_probs).array().exp();

  const double surrogate = clip_surrogate(ratios, advantages, clip_epsilon);
  const double loss = -surrogate;

  if (net_grads || log_std_grads) {
    const Vector sigma_inv = policy.std_dev().cwiseInverse();
    // d loss / d rho per sample: -A/B on the active unclipped branch, 0 on
    // the flat clipped branch.
    Vector dloss_drho = Vector::Zero(batch);
    for (Eigen::Index i = 0; i < batch; ++i) {
      const double clipped = std::clamp(ratios(i), 1.0 - clip_epsilon, 1.0 + clip_epsilon);
      if (ratios(i) * advantages(i) <= clipped * advantages(i)) {
        dloss_drho(i) = -advantages(i) / static_cast<double>(batch);
      }
    }
    const Vector factor = dloss_drho.array() * ratios.array();  // chain through rho = exp(...)
    const Matrix z = (actions - means) * sigma_inv.asDiagonal();
    if (net_grads) {
      // d log pi / d mean_d = (a_d - mu_d) / sigma_d^2
      const Matrix upstream = factor.asDiagonal() * (z * sigma_inv.asDiagonal());
      *net_grads = policy.net.backward_batch(cache, upstream);
    }
    if (log_std_grads) {
      // d log pi / d log_std_d = z_d^2 - 1
      const Matrix g = factor.asDiagonal() * (z.array().square() - 1.0).matrix();
      *log_std_grads = g.colwise().sum().transpose();
    }
  }
  return loss;
}

double critic_loss_and_grads(const Mlp& value_net, const Matrix& states, const Vector& targets,
                             MlpGrads* grads) {
  const Eigen::Index batch = states.rows();
  MlpCache cache;
  const Matrix values = value_net.forward_batch(states, grads ? &cache : nullptr);
  const Vector err = values.col(0) - targets;
  const double loss = err.squaredNorm() / static_cast<double>(batch);
  if (grads) {
    const Matrix upstream = (2.0 / static_cast<double>(batch)) * err;
    *grads = value_net.backward_batch(cache, upstream);
  }
  return loss;
}

namespace {

struct Batch {
  Matrix states;   // already conditioned
  Matrix actions;
  Vector log_probs;
  Vector advantages;
  Vector targets;
};

Batch assemble(const std::vector<const Transition*>& transitions, const Mlp& value_net,
               double gamma, bool contiguous, bool advantage_norm) {
  const Eigen::Index n = static_cast<Eigen::Index>(transitions.size());
  Batch b;
  b.states.resize(n, transitions.front()->state.size());
  b.actions.resize(n, transitions.front()->action.size());
  b.log_probs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = *transitions[static_cast<std::size_t>(i)];
    b.states.row(i) = symlog(t.state).transpose();
    b.actions.row(i) = t.action.transpose();
    b.log_probs(i) = t.log_prob;
  }
  const AdvantageBatch adv =
      advantage_batch(transitions, value_net, gamma, contiguous, advantage_norm);
  b.advantages = adv.advantages;
  b.targets = adv.targets;
  return b;
}

struct EpisodeStats {
  double reward_sum = 0;
  double see_sum = 0;
  Vector r_lu_sum;
  double r_eve_common_sum = 0;
  double r_eve_private_sum = 0;
  int viol_power = 0, viol_common = 0, viol_qos = 0, viol_linear = 0;
  int steps = 0;

  void add(double reward, const StepStats& s) {
    reward_sum += reward;
    see_sum += s.see;
    if (s.r_total_per_lu.size() > 0) {
      if (r_lu_sum.size() == 0) r_lu_sum = Vector::Zero(s.r_total_per_lu.size());
      r_lu_sum += s.r_total_per_lu;
    }
    r_eve_common_sum += s.r_eve_common;
    r_eve_private_sum += s.r_eve_private_mean;
    viol_power += !s.gate_power;
    viol_common += !s.gate_common;
    viol_qos += !s.gate_qos;
    viol_linear += !s.gate_linear;
    ++steps;
  }
};

}  // namespace

TrainResult train_ds_ppo(RolloutEnv& env, const TrainerConfig& cfg, std::uint64_t seed) {
  Rng rng_init(mix_seed(seed, 1));
  Rng rng_action(mix_seed(seed, 2));
  Rng rng_replay(mix_seed(seed, 3));

  const int state_dim = env.state_dim();
  const int action_dim = env.action_dim();
  auto policy_ptr = std::make_shared<GaussianPolicy>(
      std::vector<int>{state_dim, cfg.hidden, cfg.hidden, action_dim}, rng_init,
      cfg.log_std_init);
  auto value_ptr =
      std::make_shared<Mlp>(std::vector<int>{state_dim, cfg.hidden, cfg.hidden, 1}, rng_init);
  GaussianPolicy& policy = *policy_ptr;
  Mlp& value_net = *value_ptr;
  policy.net.biases.back() += env.initial_action_bias();
  Adam actor_adam(policy.net);
  AdamVector log_std_adam(action_dim);
  Adam critic_adam(value_net);

  ExperiencePool pool(cfg.pool_capacity);
  std::vector<Transition> episode;
  episode.reserve(static_cast<std::size_t>(cfg.batch_on));

  TrainResult result;
  result.best_action = Vector::Zero(action_dim);
  double best_reward = -std::numeric_limits<double>::infinity();

  auto abort_with_checkpoint = [&](const char* what) {
    if (!cfg.abort_checkpoint_path.empty()) {
      std::ofstream out(cfg.abort_checkpoint_path, std::ios::binary);
      save_mlp(out, policy.net);
      save_mlp(out, value_net);
      save_adam(out, actor_adam);
      save_adam(out, critic_adam);
      save_params(out, policy.log_std);
      save_rng(out, rng_action);
      save_rng(out, rng_replay);
    }
    throw std::runtime_error(std::string("train_ds_ppo: non-finite loss in ") + what);
  };

  Vector state = env.reset();
  EpisodeStats stats;
  int update_round = 0;

  for (std::int64_t t = 0; t < cfg.total_steps; ++t) {
    const Vector conditioned = symlog(state);
    const Vector mean = policy.net.forward(conditioned);
    const Vector action = policy.sample(mean, rng_action);
    const double log_prob = policy.log_prob(mean, action);
    const double value = value_net.forward(conditioned)(0);

    StepResult sr = env.step(action);
    const bool done = static_cast<int>(episode.size()) + 1 >= cfg.batch_on;

    Transition tr;
    tr.state = state;
    tr.action = action;
    tr.next_state = sr.next_state;
    tr.log_prob = log_prob;
    tr.reward = sr.reward;
    tr.value = value;
    tr.done = done;
    episode.push_back(std::move(tr));
    stats.add(sr.reward, sr.stats);

    if (sr.reward > best_reward) {
      best_reward = sr.reward;
      result.best_action = action;
    }

    state = done ? env.reset() : sr.next_state;
    if (!done) continue;

    for (auto& e : episode) pool.push(std::move(e));
    episode.clear();

    ++update_round;
    const std::int64_t steps_done = t + 1;
    const double lr_a = cfg.lr_at(cfg.lr_actor, steps_done);
    const double lr_c = cfg.lr_at(cfg.lr_critic, steps_done);

    UpdateLogRow base;
    base.step = steps_done;
    base.update = update_round;
    base.avg_reward = stats.reward_sum / stats.steps;
    base.avg_see = stats.see_sum / stats.steps;
    base.r_lu = stats.r_lu_sum.size() > 0 ? Vector(stats.r_lu_sum / stats.steps) : Vector();
    base.r_eve_common = stats.r_eve_common_sum / stats.steps;
    base.r_eve_private = stats.r_eve_private_sum / stats.steps;
    base.viol_power = stats.viol_power;
    base.viol_common = stats.viol_common;
    base.viol_qos = stats.viol_qos;
    base.viol_linear = stats.viol_linear;
    result.final_avg_reward = base.avg_reward;
    result.final_avg_see = base.avg_see;
    stats = EpisodeStats{};

    auto run_phase = [&](int phase, int epochs, const std::vector<const Transition*>& sample,
                         bool contiguous) {
      if (epochs <= 0 || sample.empty()) return;
      const Batch batch =
          assemble(sample, value_net, cfg.gamma, contiguous, cfg.advantage_norm);
      for (int e = 1; e <= epochs; ++e) {
        MlpGrads net_grads;
        Vector log_std_grads;
        const double actor_loss =
            actor_loss_and_grads(policy, batch.states, batch.actions, batch.log_probs,
                                 batch.advantages, cfg.clip_epsilon, &net_grads, &log_std_grads);
        if (!std::isfinite(actor_loss)) abort_with_checkpoint("actor update");
        actor_adam.step(policy.net, net_grads, lr_a);
        log_std_adam.step(policy.log_std, log_std_grads, lr_a);
        policy.clamp_log_std();

        MlpGrads critic_grads;
        const double critic_loss =
            critic_loss_and_grads(value_net, batch.states, batch.targets, &critic_grads);
        if (!std::isfinite(critic_loss)) abort_with_checkpoint("critic update");
        critic_adam.step(value_net, critic_grads, lr_c);

        UpdateLogRow row = base;
        row.phase = phase;
        row.epoch = e;
        row.actor_loss = actor_loss;
        row.critic_loss = critic_loss;
        row.lr = lr_a;
        result.rows.push_back(std::move(row));
      }
    };

    run_phase(0, cfg.epochs_on, pool.last(static_cast<std::size_t>(cfg.batch_on)), true);
    run_phase(1, cfg.epochs_off,
              pool.sample_uniform(static_cast<std::size_t>(cfg.batch_off), rng_replay), false);
  }

  result.best_reward = std::isfinite(best_reward) ? best_reward : 0.0;
  result.policy = policy_ptr;
  result.value_net = value_ptr;
  return result;
}

}  // namespace vlcsee
