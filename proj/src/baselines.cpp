// SPDX-License-Identifier: Apache-2.0
#include "vlcsee/baselines.hpp"

#include <limits>

namespace vlcsee {

DecodeOptions decode_options_for(const BaselineSpec& spec) {
  DecodeOptions opt;
  opt.beam_mode = spec.kind == BaselineKind::kMrtOnly ? BeamMode::kMrtOnly : BeamMode::kMrtZf;
  opt.sdma = spec.sdma;
  opt.irs_off = spec.irs_off;
  return opt;
}

TrainResult run_ppo_baseline(RolloutEnv& env, const TrainerConfig& cfg, std::uint64_t seed) {
  TrainerConfig single = cfg;
  single.epochs_off = 0;
  return train_ds_ppo(env, single, seed);
}

TrainResult run_eps_greedy(RolloutEnv& env, const TrainerConfig& cfg, std::uint64_t seed,
                           double epsilon) {
  Rng rng(mix_seed(seed, 2));
  const int action_dim = env.action_dim();

  TrainResult result;
  Vector incumbent = Vector::Zero(action_dim);
  double best_reward = -std::numeric_limits<double>::infinity();

  env.reset();
  double reward_sum = 0, see_sum = 0;
  Vector r_lu_sum;
  double r_eve_common_sum = 0, r_eve_private_sum = 0;
  int viol[4] = {0, 0, 0, 0};
  int window = 0;
  int update = 0;

  for (std::int64_t t = 0; t < cfg.total_steps; ++t) {
    Vector action(action_dim);
    const bool explore = t == 0 || rng.uniform() < epsilon;
    if (explore) {
      for (int i = 0; i < action_dim; ++i) action(i) = rng.uniform(-3.0, 3.0);
    } else {
      action = incumbent;
    }
    const StepResult sr = env.step(action);
    if (sr.reward > best_reward) {
      best_reward = sr.reward;
      incumbent = action;
    }
    reward_sum += sr.reward;
    see_sum += sr.stats.see;
    if (sr.stats.r_total_per_lu.size() > 0) {
      if (r_lu_sum.size() == 0) r_lu_sum = Vector::Zero(sr.stats.r_total_per_lu.size());
      r_lu_sum += sr.stats.r_total_per_lu;
    }
    r_eve_common_sum += sr.stats.r_eve_common;
    r_eve_private_sum += sr.stats.r_eve_private_mean;
    viol[0] += !sr.stats.gate_power;
    viol[1] += !sr.stats.gate_common;
    viol[2] += !sr.stats.gate_qos;
    viol[3] += !sr.stats.gate_linear;
    ++window;

    if (window == cfg.batch_on || t + 1 == cfg.total_steps) {
      UpdateLogRow row;
      row.step = t + 1;
      row.update = ++update;
      row.phase = 0;
      row.epoch = 1;
      row.avg_reward = reward_sum / window;
      row.avg_see = see_sum / window;
      row.r_lu = r_lu_sum.size() > 0 ? Vector(r_lu_sum / window) : Vector();
      row.r_eve_common = r_eve_common_sum / window;
      row.r_eve_private = r_eve_private_sum / window;
      row.viol_power = viol[0];
      row.viol_common = viol[1];
      row.viol_qos = viol[2];
      row.viol_linear = viol[3];
      result.final_avg_reward = row.avg_reward;
      result.final_avg_see = row.avg_see;
      result.rows.push_back(std::move(row));
      reward_sum = see_sum = r_eve_common_sum = r_eve_private_sum = 0;
      r_lu_sum.resize(0);
      viol[0] = viol[1] = viol[2] = viol[3] = 0;
      window = 0;
    }
  }
  result.best_reward = std::isfinite(best_reward) ? best_reward : 0.0;
  result.best_action = incumbent;
  return result;
}

TrainResult run_baseline(const BaselineSpec& spec, RolloutEnv& env, const TrainerConfig& cfg,
                         std::uint64_t seed) {
  switch (spec.kind) {
    case BaselineKind::kPpo:
      return run_ppo_baseline(env, cfg, seed);
    case BaselineKind::kEpsGreedy:
      return run_eps_greedy(env, cfg, seed, spec.epsilon);
    case BaselineKind::kDsPpo:
    case BaselineKind::kMrtOnly:
      return train_ds_ppo(env, cfg, seed);
  }
  throw std::logic_error("run_baseline: unhandled kind");
}

}  // namespace vlcsee
