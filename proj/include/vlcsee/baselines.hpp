// SPDX-License-Identifier: Apache-2.0
//
// Reference policies: single-sampling PPO, incumbent-keeping epsilon-greedy
// search, matched-filter-only beam design, and the SDMA / reflector-off
// ablations (applied through the environment's decode options).
#pragma once

#include "vlcsee/config.hpp"
#include "vlcsee/env.hpp"
#include "vlcsee/ppo.hpp"

namespace vlcsee {

// Environment decode options implied by a baseline (beam mode + ablations).
DecodeOptions decode_options_for(const BaselineSpec& spec);

// Identical trainer with the off-policy phase removed.
TrainResult run_ppo_baseline(RolloutEnv& env, const TrainerConfig& cfg, std::uint64_t seed);

// Every step explores with probability epsilon (uniform logits in [-3, 3]),
// otherwise replays the incumbent best action; the incumbent follows the
// best reward seen so far. Log rows are emitted once per batch_on steps.
TrainResult run_eps_greedy(RolloutEnv& env, const TrainerConfig& cfg, std::uint64_t seed,
                           double epsilon = 0.1);

// Dispatch on the baseline kind; the env must already carry
// decode_options_for(spec).
TrainResult run_baseline(const BaselineSpec& spec, RolloutEnv& env, const TrainerConfig& cfg,
                         std::uint64_t seed);

}  // namespace vlcsee
