// SPDX-License-Identifier: Apache-2.0
//
// The decision problem as a learning environment: raw network outputs are
// squashed into a transmission decision (stream powers, MRT/ZF directions,
// DC bias, common-rate split, element assignment), evaluated through the
// channel and rate model, and scored with a gated reward.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vlcsee/geometry.hpp"
#include "vlcsee/rollout.hpp"
#include "vlcsee/rsma.hpp"

namespace vlcsee {

// Raw action vector layout, in order:
//   [0, K+1)                        stream power logits (common first)
//   [K+1, K+1+L)                    per-LED DC logits
//   [K+1+L, K+1+L+N*L*K)            relaxed assignment logits, row-major
//                                   (element n, pair p) at n*L*K + p
//   [K+1+L+N*L*K, dim)              common-rate logits
struct ActionLayout {
  int num_elements = 0;  // N
  int num_leds = 0;      // L
  int num_lus = 0;       // K

  int beam_count() const { return num_lus + 1; }
  int align_count() const { return num_elements * num_leds * num_lus; }
  int beam_offset() const { return 0; }
  int dc_offset() const { return beam_count(); }
  int align_offset() const { return beam_count() + num_leds; }
  int common_offset() const { return align_offset() + align_count(); }
  int dim() const { return common_offset() + num_lus; }
};

// State vector layout, in order:
//   [0, A)          previous action, decoded-and-squashed (same block order
//                   as ActionLayout: powers, DC currents, relaxed
//                   assignment, common rates)
//   [A, A+K)        per-user common-stream SINR terms
//   [A+K, A+2K)     per-user private-stream SINR terms
//   [A+2K, A+2K+1)  eavesdropper common SINR term
//   [A+2K+1, A+3K+1) eavesdropper private SINR terms
//   [A+3K+1, dim)   previous reward
// SINR entries are the exact argument of log2(1 + .).
struct StateLayout {
  ActionLayout action;

  int sinr_offset() const { return action.dim(); }
  int sinr_count() const { return 3 * action.num_lus + 1; }
  int reward_offset() const { return sinr_offset() + sinr_count(); }
  int dim() const { return reward_offset() + 1; }
};

enum class BeamMode {
  kMrtZf,    // MRT common direction, zero-forcing private directions
  kMrtOnly,  // MRT for every stream
};

struct DecodeOptions {
  BeamMode beam_mode = BeamMode::kMrtZf;
  bool sdma = false;     // drop the common stream: v0 = 0, c = 0
  bool irs_off = false;  // force the element assignment to idle
};

// Raised when the effective channel cannot support zero-forcing.
struct RankDeficientChannel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecodedAction {
  RsmaDecision decision;
  AlignmentState alignment;
  Vector action_block;     // squashed form, ActionLayout order
  LuRates lu;              // rates under the decoded beams
  double min_common_rate = 0;
};

// Squash and assemble a raw action. Throws std::invalid_argument on a
// length mismatch and RankDeficientChannel when the effective channel
// matrix has (numerically) dependent rows.
DecodedAction decode_action(const Vector& raw, const ChannelSet& channels,
                            const PowerLimits& lim, const DecodeOptions& opt = {});

Vector build_state(const Vector& action_block, const Vector& sinr_block, double prev_reward,
                   const StateLayout& layout);

// SEE gated by the power, common-rate, QoS and linear-region predicates.
double reward(const RateReport& report, const ConstraintVerdicts& verdicts);

// Kept only while auditing: enough to re-derive rates and gates offline.
struct AuditRecord {
  std::int64_t step = 0;
  double reward = 0;
  RsmaDecision decision;
  AlignmentState alignment;
};

class VlcEnv final : public RolloutEnv {
 public:
  VlcEnv(Scene scene, OpticalParams optics, PowerLimits limits, DecodeOptions options = {});

  int state_dim() const override { return state_layout_.dim(); }
  int action_dim() const override { return action_layout_.dim(); }

  // Initial state is the zero vector.
  Vector reset() override;
  StepResult step(const Vector& raw_action) override;

  // Conservative starting point: the midpoint action overdraws the power
  // budget by design of the squash ranges, so exploration starts with the
  // stream powers, bias currents and rate split pulled low.
  Vector initial_action_bias() const override;

  const ChannelSet& channels() const { return channels_; }
  const Scene& scene() const { return scene_; }
  const PowerLimits& limits() const { return limits_; }
  const DecodeOptions& options() const { return options_; }
  const ActionLayout& action_layout() const { return action_layout_; }
  const StateLayout& state_layout() const { return state_layout_; }

  // Details of the most recent step, for tests and diagnostics.
  const RateReport& last_report() const { return last_report_; }
  const ConstraintVerdicts& last_verdicts() const { return last_verdicts_; }
  const DecodedAction& last_decoded() const { return last_decoded_; }

  void enable_audit(bool on) { audit_enabled_ = on; }
  const std::vector<AuditRecord>& audit() const { return audit_; }

 private:
  Scene scene_;
  OpticalParams optics_;
  PowerLimits limits_;
  DecodeOptions options_;
  ChannelSet channels_;
  ActionLayout action_layout_;
  StateLayout state_layout_;
  Vector state_;
  std::int64_t step_count_ = 0;
  RateReport last_report_;
  ConstraintVerdicts last_verdicts_;
  DecodedAction last_decoded_;
  bool audit_enabled_ = false;
  std::vector<AuditRecord> audit_;
};

// Returns a copy of `options` with the requested ablations applied.
DecodeOptions apply_ablation(DecodeOptions options, bool sdma, bool irs_off);

}  // namespace vlcsee
