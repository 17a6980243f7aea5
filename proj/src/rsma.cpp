// SPDX-License-Identifier: Apache-2.0
#include "vlcsee/rsma.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vlcsee {

namespace {
constexpr double kSinrScale = M_E / (2.0 * M_PI);
}

void PowerLimits::validate() const {
  std::ostringstream problems;
  if (!(p_max > 0)) problems << "p_max must be positive; ";
  if (p_circuit < 0) problems << "p_circuit must be nonnegative; ";
  if (i_min > i_max) problems << "i_min must not exceed i_max; ";
  if ((qos.array() < 0).any()) problems << "qos entries must be nonnegative; ";
  if ((noise_lu.array() <= 0).any()) problems << "noise_lu entries must be positive; ";
  if (!(noise_eve > 0)) problems << "noise_eve must be positive; ";
  const std::string s = problems.str();
  if (!s.empty()) throw std::invalid_argument("PowerLimits: " + s);
}

RsmaDecision RsmaDecision::zero(int num_lus, int num_leds) {
  RsmaDecision d;
  d.v = Matrix::Zero(num_lus + 1, num_leds);
  d.dc_bias = Vector::Zero(num_leds);
  d.c = Vector::Zero(num_lus);
  return d;
}

double total_power(const RsmaDecision& d, const PowerLimits& lim) {
  double beams = 0.0;
  for (int i = 0; i < d.v.rows(); ++i) beams += d.v.row(i).squaredNorm();
  return beams + lim.u_led * d.dc_bias.sum() + lim.p_circuit;
}

Vector linear_region_margin(const RsmaDecision& d, const PowerLimits& lim) {
  const int num_leds = d.num_leds();
  Vector margin(num_leds);
  for (int l = 0; l < num_leds; ++l) {
    const double delta = std::min(d.dc_bias(l) - lim.i_min, lim.i_max - d.dc_bias(l));
    margin(l) = delta - d.v.col(l).cwiseAbs().sum();
  }
  return margin;
}

LuRates lu_rates(const Matrix& h_eff, const RsmaDecision& d, const PowerLimits& lim) {
  const int num_lus = static_cast<int>(h_eff.rows());
  if (d.num_lus() != num_lus || d.num_leds() != h_eff.cols()) {
    throw std::invalid_argument("lu_rates: dimension mismatch between channel and decision");
  }
  LuRates out;
  out.r_common.resize(num_lus);
  out.r_private.resize(num_lus);
  out.sinr_common.resize(num_lus);
  out.sinr_private.resize(num_lus);
  for (int k = 0; k < num_lus; ++k) {
    const Vector h = h_eff.row(k).transpose();
    const double common_sig = std::pow(h.dot(d.v.row(0).transpose()), 2);
    double private_total = 0.0;
    for (int i = 1; i <= num_lus; ++i) private_total += std::pow(h.dot(d.v.row(i).transpose()), 2);
    const double own = std::pow(h.dot(d.v.row(k + 1).transpose()), 2);
    out.sinr_common(k) = kSinrScale * common_sig / (private_total + lim.noise_lu(k));
    out.sinr_private(k) = kSinrScale * own / (private_total - own + lim.noise_lu(k));
    out.r_common(k) = std::log2(1.0 + out.sinr_common(k));
    out.r_private(k) = std::log2(1.0 + out.sinr_private(k));
  }
  return out;
}

EveRates eve_rates(const Vector& h_eve, const RsmaDecision& d, const PowerLimits& lim) {
  const int num_lus = d.num_lus();
  if (h_eve.size() != d.num_leds()) {
    throw std::invalid_argument("eve_rates: dimension mismatch between channel and decision");
  }
  EveRates out;
  out.r_private.resize(num_lus);
  out.sinr_private.resize(num_lus);
  const double common_sig = std::pow(h_eve.dot(d.v.row(0).transpose()), 2);
  double private_total = 0.0;
  for (int i = 1; i <= num_lus; ++i) private_total += std::pow(h_eve.dot(d.v.row(i).transpose()), 2);
  out.sinr_common = kSinrScale * common_sig / (private_total + lim.noise_eve);
  out.r_common = std::log2(1.0 + out.sinr_common);
  for (int k = 0; k < num_lus; ++k) {
    const double own = std::pow(h_eve.dot(d.v.row(k + 1).transpose()), 2);
    // The common stream stays in the interference: no cancellation at Eve.
    out.sinr_private(k) =
        kSinrScale * own / (common_sig + private_total - own + lim.noise_eve);
    out.r_private(k) = std::log2(1.0 + out.sinr_private(k));
  }
  return out;
}

RateReport secrecy_and_see(const LuRates& lu, const EveRates& eve, const RsmaDecision& d,
                           const PowerLimits& lim) {
  RateReport report;
  report.r_common = lu.r_common;
  report.r_private = lu.r_private;
  report.r_eve_common = eve.r_common;
  report.r_eve_private = eve.r_private;
  report.r_total_per_lu = d.c + lu.r_private;
  double secrecy = std::max(d.c.sum() - eve.r_common, 0.0);
  for (int k = 0; k < lu.r_private.size(); ++k) {
    secrecy += std::max(lu.r_private(k) - eve.r_private(k), 0.0);
  }
  report.secrecy_total = secrecy;
  report.p_total = total_power(d, lim);
  report.see = secrecy / report.p_total;
  return report;
}

ConstraintVerdicts feasibility(const RsmaDecision& d, const RateReport& report,
                               const PowerLimits& lim, const AlignmentState& alignment) {
  ConstraintVerdicts v;
  v.qos = true;
  for (int k = 0; k < d.c.size(); ++k) {
    if (!(d.c(k) + report.r_private(k) >= lim.qos(k))) v.qos = false;
  }
  v.common_cap = d.c.sum() <= report.r_common.minCoeff();
  v.power = report.p_total <= lim.p_max;
  const Vector margin = linear_region_margin(d, lim);
  v.linear = (margin.array() >= 0.0).all();
  v.alignment_rows = true;
  for (int n = 0; n < alignment.q.rows(); ++n) {
    if (alignment.q.row(n).sum() > 1) v.alignment_rows = false;
  }
  v.c_nonneg = (d.c.array() >= 0.0).all();
  v.delta_nonneg = true;
  for (int l = 0; l < d.num_leds(); ++l) {
    if (std::min(d.dc_bias(l) - lim.i_min, lim.i_max - d.dc_bias(l)) < 0.0) v.delta_nonneg = false;
  }
  return v;
}

OracleResult exhaustive_alignment_oracle(const ChannelSet& channels, const RsmaDecision& d,
                                         const PowerLimits& lim,
                                         std::vector<OracleEntry>* trace) {
  const int num_elems = channels.num_elements();
  const int num_pairs = channels.num_leds() * channels.num_lus();
  const double total = std::pow(static_cast<double>(num_pairs + 1), num_elems);
  if (total > 1e6) {
    throw std::invalid_argument("exhaustive_alignment_oracle: more than 10^6 configurations");
  }

  OracleResult result;
  result.best = AlignmentState::zero(num_elems, channels.num_leds(), channels.num_lus());

  std::vector<int> digits(num_elems, 0);  // 0 = idle, p = pair p
  AlignmentState current = AlignmentState::zero(num_elems, channels.num_leds(), channels.num_lus());
  bool have_any = false;
  bool have_feasible = false;

  while (true) {
    current.q.setZero();
    for (int n = 0; n < num_elems; ++n) {
      if (digits[n] > 0) current.q(n, digits[n] - 1) = 1;
    }
    const Matrix h = effective_channel(channels, current);
    const LuRates lu = lu_rates(h, d, lim);
    const EveRates eve = eve_rates(channels.h_los_eve, d, lim);
    const RateReport report = secrecy_and_see(lu, eve, d, lim);
    const ConstraintVerdicts verdicts = feasibility(d, report, lim, current);
    const bool feasible = verdicts.all();
    if (trace) trace->push_back(OracleEntry{report.see, feasible});
    ++result.configurations;

    const bool better = feasible == have_feasible ? report.see > result.best_see
                                                  : feasible && !have_feasible;
    if (!have_any || better) {
      result.best_see = report.see;
      result.best = current;
      result.feasible = feasible;
      have_any = true;
      have_feasible = have_feasible || feasible;
    }

    // Advance the mixed-radix counter, row 0 least significant.
    int n = 0;
    while (n < num_elems) {
      if (++digits[n] <= num_pairs) break;
      digits[n] = 0;
      ++n;
    }
    if (n == num_elems) break;
  }
  return result;
}

}  // namespace vlcsee
