// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vlcsee/mlp.hpp"

namespace vlcsee {

// Diagonal Gaussian over actions: the mean comes from a network, the
// log standard deviations are free state-independent parameters clamped
// to [-20, 2].
class GaussianPolicy {
 public:
  GaussianPolicy(std::vector<int> sizes, Rng& rng, double log_std_init);

  int state_dim() const { return net.input_dim(); }
  int action_dim() const { return net.output_dim(); }

  Vector std_dev() const { return log_std.array().exp(); }

  Vector sample(const Vector& mean, Rng& rng) const;
  double log_prob(const Vector& mean, const Vector& action) const;
  Vector log_prob_batch(const Matrix& means, const Matrix& actions) const;
  double entropy() const;

  void clamp_log_std();

  Mlp net;
  Vector log_std;
};

}  // namespace vlcsee
