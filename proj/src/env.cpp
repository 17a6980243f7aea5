// SPDX-License-Identifier: Apache-2.0
#include "vlcsee/env.hpp"

#include <cmath>

namespace vlcsee {

namespace {

inline double squash01(double x) { return 0.5 * (std::tanh(x) + 1.0); }

constexpr double kRankTolerance = 1e-12;

}  // namespace

DecodedAction decode_action(const Vector& raw, const ChannelSet& channels,
                            const PowerLimits& lim, const DecodeOptions& opt) {
  ActionLayout layout{channels.num_elements(), channels.num_leds(), channels.num_lus()};
  if (raw.size() != layout.dim()) {
    throw std::invalid_argument("decode_action: raw action has wrong length");
  }
  const int num_lus = layout.num_lus;
  const int num_leds = layout.num_leds;
  const int num_elems = layout.num_elements;
  const int num_pairs = num_leds * num_lus;

  DecodedAction out;
  out.action_block = Vector::Zero(layout.dim());

  // Relaxed assignment, then binary projection.
  RelaxedAlignment relaxed;
  relaxed.num_leds = num_leds;
  relaxed.num_lus = num_lus;
  relaxed.q_tilde.resize(num_elems, num_pairs);
  for (int n = 0; n < num_elems; ++n) {
    for (int p = 0; p < num_pairs; ++p) {
      const double value = opt.irs_off ? 0.0 : squash01(raw(layout.align_offset() + n * num_pairs + p));
      relaxed.q_tilde(n, p) = value;
      out.action_block(layout.align_offset() + n * num_pairs + p) = value;
    }
  }
  out.alignment = opt.irs_off ? AlignmentState::zero(num_elems, num_leds, num_lus)
                              : project_alignment(relaxed);

  // Stream powers and DC currents are decodable before the channel.
  Vector powers(layout.beam_count());
  for (int i = 0; i <= num_lus; ++i) {
    powers(i) = std::sqrt(lim.p_max) * squash01(raw(layout.beam_offset() + i));
  }
  if (opt.sdma) powers(0) = 0.0;
  for (int i = 0; i <= num_lus; ++i) out.action_block(layout.beam_offset() + i) = powers(i);

  out.decision = RsmaDecision::zero(num_lus, num_leds);
  for (int l = 0; l < num_leds; ++l) {
    out.decision.dc_bias(l) = lim.i_max * squash01(raw(layout.dc_offset() + l));
    out.action_block(layout.dc_offset() + l) = out.decision.dc_bias(l);
  }

  const Matrix h = effective_channel(channels, out.alignment);

  // Common direction: matched to the summed user channels.
  Vector h_sum = Vector::Zero(num_leds);
  for (int k = 0; k < num_lus; ++k) h_sum += h.row(k).transpose();
  const double h_sum_norm = h_sum.norm();
  if (h_sum_norm == 0.0) {
    throw RankDeficientChannel("decode_action: all user channels are zero");
  }
  const Vector common_dir = h_sum / h_sum_norm;

  // Private directions: jointly normalized pseudo-inverse columns (or
  // per-user matched directions in MRT-only mode).
  Matrix private_dirs(num_leds, num_lus);
  if (opt.beam_mode == BeamMode::kMrtOnly) {
    for (int k = 0; k < num_lus; ++k) {
      const double norm = h.row(k).norm();
      if (norm == 0.0) throw RankDeficientChannel("decode_action: zero channel row");
      private_dirs.col(k) = h.row(k).transpose() / norm;
    }
  } else {
    const Matrix gram = h * h.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > kRankTolerance * hi)) {
      throw RankDeficientChannel("decode_action: effective channel is rank deficient");
    }
    const Matrix pinv = h.transpose() * gram.inverse();
    private_dirs = pinv / pinv.norm();
  }

  out.decision.v.row(0) = powers(0) * common_dir.transpose();
  for (int k = 0; k < num_lus; ++k) {
    out.decision.v.row(k + 1) = powers(k + 1) * private_dirs.col(k).transpose();
  }

  // Common-rate split scaled by the worst common rate under these beams.
  out.lu = lu_rates(h, out.decision, lim);
  out.min_common_rate = out.lu.r_common.minCoeff();
  for (int k = 0; k < num_lus; ++k) {
    const double c = opt.sdma ? 0.0
                              : out.min_common_rate * squash01(raw(layout.common_offset() + k));
    out.decision.c(k) = c;
    out.action_block(layout.common_offset() + k) = c;
  }
  return out;
}

Vector build_state(const Vector& action_block, const Vector& sinr_block, double prev_reward,
                   const StateLayout& layout) {
  if (action_block.size() != layout.action.dim() || sinr_block.size() != layout.sinr_count()) {
    throw std::invalid_argument("build_state: block lengths do not match layout");
  }
  Vector state(layout.dim());
  state.segment(0, action_block.size()) = action_block;
  state.segment(layout.sinr_offset(), sinr_block.size()) = sinr_block;
  state(layout.reward_offset()) = prev_reward;
  return state;
}

double reward(const RateReport& report, const ConstraintVerdicts& verdicts) {
  const double gates = (verdicts.power ? 1.0 : 0.0) * (verdicts.common_cap ? 1.0 : 0.0) *
                       (verdicts.qos ? 1.0 : 0.0) * (verdicts.linear ? 1.0 : 0.0);
  return report.see * gates;
}

VlcEnv::VlcEnv(Scene scene, OpticalParams optics, PowerLimits limits, DecodeOptions options)
    : scene_(std::move(scene)),
      optics_(optics),
      limits_(std::move(limits)),
      options_(options),
      channels_(build_channel_set(scene_, optics_)) {
  limits_.validate();
  if (limits_.qos.size() != scene_.num_lus() || limits_.noise_lu.size() != scene_.num_lus()) {
    throw std::invalid_argument("VlcEnv: qos/noise vectors must have one entry per user");
  }
  action_layout_ = ActionLayout{scene_.num_elements(), scene_.num_leds(), scene_.num_lus()};
  state_layout_ = StateLayout{action_layout_};
  state_ = Vector::Zero(state_layout_.dim());
}

Vector VlcEnv::reset() {
  state_ = Vector::Zero(state_layout_.dim());
  return state_;
}

Vector VlcEnv::initial_action_bias() const {
  Vector bias = Vector::Zero(action_layout_.dim());
  for (int i = 0; i <= action_layout_.num_lus; ++i) bias(action_layout_.beam_offset() + i) = -1.5;
  for (int l = 0; l < action_layout_.num_leds; ++l) bias(action_layout_.dc_offset() + l) = -1.0;
  for (int k = 0; k < action_layout_.num_lus; ++k) bias(action_layout_.common_offset() + k) = -1.0;
  return bias;
}

StepResult VlcEnv::step(const Vector& raw_action) {
  const int num_lus = action_layout_.num_lus;
  StepResult result;
  ++step_count_;

  DecodedAction decoded;
  bool decode_failed = false;
  try {
    decoded = decode_action(raw_action, channels_, limits_, options_);
  } catch (const RankDeficientChannel&) {
    decode_failed = true;
  }

  if (decode_failed) {
    // Penalized step: no reward, SINR block carried over unchanged.
    Vector action_block = Vector::Zero(action_layout_.dim());
    const Vector sinr_block =
        state_.segment(state_layout_.sinr_offset(), state_layout_.sinr_count());
    state_ = build_state(action_block, sinr_block, 0.0, state_layout_);
    result.next_state = state_;
    result.reward = 0.0;
    result.stats.decode_failed = true;
    result.stats.r_total_per_lu = Vector::Zero(num_lus);
    last_report_ = RateReport{};
    last_verdicts_ = ConstraintVerdicts{};
    last_decoded_ = DecodedAction{};
    return result;
  }

  const EveRates eve = eve_rates(channels_.h_los_eve, decoded.decision, limits_);
  const RateReport report = secrecy_and_see(decoded.lu, eve, decoded.decision, limits_);
  const ConstraintVerdicts verdicts =
      feasibility(decoded.decision, report, limits_, decoded.alignment);
  const double r = reward(report, verdicts);

  Vector sinr_block(state_layout_.sinr_count());
  sinr_block.segment(0, num_lus) = decoded.lu.sinr_common;
  sinr_block.segment(num_lus, num_lus) = decoded.lu.sinr_private;
  sinr_block(2 * num_lus) = eve.sinr_common;
  sinr_block.segment(2 * num_lus + 1, num_lus) = eve.sinr_private;

  state_ = build_state(decoded.action_block, sinr_block, r, state_layout_);

  result.next_state = state_;
  result.reward = r;
  result.stats.see = report.see;
  result.stats.r_total_per_lu = report.r_total_per_lu;
  result.stats.r_eve_common = report.r_eve_common;
  result.stats.r_eve_private_mean = report.r_eve_private.size() > 0 ? report.r_eve_private.mean() : 0.0;
  result.stats.gate_power = verdicts.power;
  result.stats.gate_common = verdicts.common_cap;
  result.stats.gate_qos = verdicts.qos;
  result.stats.gate_linear = verdicts.linear;

  last_report_ = report;
  last_verdicts_ = verdicts;
  last_decoded_ = decoded;

  if (audit_enabled_ && r != 0.0) {
    audit_.push_back(AuditRecord{step_count_, r, decoded.decision, decoded.alignment});
  }
  return result;
}

DecodeOptions apply_ablation(DecodeOptions options, bool sdma, bool irs_off) {
  options.sdma = options.sdma || sdma;
  options.irs_off = options.irs_off || irs_off;
  return options;
}

}  // namespace vlcsee
