// SPDX-License-Identifier: Apache-2.0
//
// Rate-splitting transmission over the optical downlink: stream powers,
// per-user common/private rates, eavesdropper rates, secrecy rate, and
// secrecy energy efficiency, plus the feasibility predicates of the
// resource-allocation problem and an exhaustive small-instance oracle
// for the element assignment.
#pragma once

#include <cstdint>
#include <vector>

#include "vlcsee/alignment.hpp"
#include "vlcsee/geometry.hpp"
#include "vlcsee/linalg.hpp"

namespace vlcsee {

struct PowerLimits {
  double p_max = 20.0;     // total electrical power budget [W]
  double p_circuit = 2.0;  // fixed circuit power [W]
  double u_led = 2.0;      // LED forward voltage [V]
  double i_min = 0.0;      // linear-region lower drive current [A]
  double i_max = 5.0;      // linear-region upper drive current [A]
  Vector qos;              // per-user minimum total rate [bit/s/Hz]
  Vector noise_lu;         // per-user noise power [W]
  double noise_eve = 1e-13;

  void validate() const;
};

struct RsmaDecision {
  Matrix v;        // (K+1) x L beamformers; row 0 carries the common stream
  Vector dc_bias;  // per-LED DC drive current [A]
  Vector c;        // per-user common-rate allocation [bit/s/Hz]

  int num_lus() const { return static_cast<int>(v.rows()) - 1; }
  int num_leds() const { return static_cast<int>(v.cols()); }

  static RsmaDecision zero(int num_lus, int num_leds);
};

// sum_i ||v_i||^2 + U_led * sum_l dc_l + P_circuit
double total_power(const RsmaDecision& d, const PowerLimits& lim);

// Per-LED margin: min(dc_l - I_min, I_max - dc_l) - sum_i |v(i, l)|.
// Nonnegative entries mean the LED stays in its linear operating region.
Vector linear_region_margin(const RsmaDecision& d, const PowerLimits& lim);

// Rates carry the quantity inside log2(1 + .) alongside the rate itself so
// callers can reconstruct them exactly.
struct LuRates {
  Vector r_common;      // K
  Vector r_private;     // K
  Vector sinr_common;   // K
  Vector sinr_private;  // K
};

struct EveRates {
  double r_common = 0;
  double sinr_common = 0;
  Vector r_private;   // K
  Vector sinr_private;  // K
};

LuRates lu_rates(const Matrix& h_eff, const RsmaDecision& d, const PowerLimits& lim);
EveRates eve_rates(const Vector& h_eve, const RsmaDecision& d, const PowerLimits& lim);

struct RateReport {
  Vector r_common;        // K
  Vector r_private;       // K
  double r_eve_common = 0;
  Vector r_eve_private;   // K
  Vector r_total_per_lu;  // c_k + r_private_k
  double secrecy_total = 0;
  double see = 0;
  double p_total = 0;
};

RateReport secrecy_and_see(const LuRates& lu, const EveRates& eve, const RsmaDecision& d,
                           const PowerLimits& lim);

struct ConstraintVerdicts {
  bool qos = false;            // c_k + R_k^P >= qos_k for every user
  bool common_cap = false;     // sum_k c_k <= min_k R_k^C
  bool power = false;          // P_total <= P_max
  bool linear = false;         // every linear-region margin >= 0
  bool alignment_rows = false; // each element serves at most one pair
  bool c_nonneg = false;
  bool delta_nonneg = false;   // min(dc - I_min, I_max - dc) >= 0 per LED

  bool all() const {
    return qos && common_cap && power && linear && alignment_rows && c_nonneg && delta_nonneg;
  }
};

ConstraintVerdicts feasibility(const RsmaDecision& d, const RateReport& report,
                               const PowerLimits& lim, const AlignmentState& alignment);

struct OracleEntry {
  double see = 0;
  bool feasible = false;
};

struct OracleResult {
  double best_see = 0;
  AlignmentState best;
  bool feasible = false;         // true when at least one configuration is feasible
  std::uint64_t configurations = 0;
};

// Enumerates every row assignment of the alignment matrix (each element
// independently idle or serving one of the L*K pairs) and returns the
// SEE-maximizing feasible configuration. When nothing is feasible the
// best configuration by SEE is returned with feasible=false. Guarded to
// (L*K + 1)^N <= 10^6; throws std::invalid_argument above that.
//
// Enumeration order: configurations are mixed-radix counters over rows,
// row 0 least significant, digit 0 = idle, digit p = pair p. `trace`,
// when non-null, receives one entry per configuration in that order.
OracleResult exhaustive_alignment_oracle(const ChannelSet& channels, const RsmaDecision& d,
                                         const PowerLimits& lim,
                                         std::vector<OracleEntry>* trace = nullptr);

}  // namespace vlcsee
