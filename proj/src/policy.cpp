// SPDX-License-Identifier: Apache-2.0
#include "vlcsee/policy.hpp"

#include <cmath>

namespace vlcsee {

namespace {
constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;
constexpr double kHalfLog2Pi = 0.9189385332046727;  // log(2*pi) / 2
}  // namespace

GaussianPolicy::GaussianPolicy(std::vector<int> sizes, Rng& rng, double log_std_init)
    : net(std::move(sizes), rng, 0.01),
      log_std(Vector::Constant(net.output_dim(), log_std_init)) {
  clamp_log_std();
}

Vector GaussianPolicy::sample(const Vector& mean, Rng& rng) const {
  Vector out(mean.size());
  const Vector sigma = std_dev();
  for (int i = 0; i < mean.size(); ++i) out(i) = mean(i) + sigma(i) * rng.gaussian();
  return out;
}

double GaussianPolicy::log_prob(const Vector& mean, const Vector& action) const {
  const Vector sigma = std_dev();
  double lp = 0.0;
  for (int i = 0; i < mean.size(); ++i) {
    const double z = (action(i) - mean(i)) / sigma(i);
    lp += -0.5 * z * z - log_std(i) - kHalfLog2Pi;
  }
  return lp;
}

Vector GaussianPolicy::log_prob_batch(const Matrix& means, const Matrix& actions) const {
  const Vector sigma_inv = std_dev().cwiseInverse();
  const Matrix z = (actions - means) * sigma_inv.asDiagonal();
  Vector lp = -0.5 * z.array().square().rowwise().sum();
  lp.array() += -log_std.sum() - kHalfLog2Pi * static_cast<double>(means.cols());
  return lp;
}

double GaussianPolicy::entropy() const {
  // 0.5 * log(2*pi*e) per dimension plus the log widths
  return log_std.sum() + 0.5 * (1.0 + std::log(2.0 * M_PI)) * static_cast<double>(log_std.size());
}

void GaussianPolicy::clamp_log_std() {
  log_std = log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

}  // namespace vlcsee
