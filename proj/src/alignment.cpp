// SPDX-License-Identifier: Apache-2.0
#include "vlcsee/alignment.hpp"

#include <sstream>
#include <stdexcept>

namespace vlcsee {

int merged_index(int led, int lu, int num_lus) { return lu + (led - 1) * num_lus; }

LedLuPair pair_indices(int p, int num_leds, int num_lus) {
  if (p < 1 || p > num_leds * num_lus) {
    std::ostringstream msg;
    msg << "pair_indices: index " << p << " outside [1, " << num_leds * num_lus << "]";
    throw std::out_of_range(msg.str());
  }
  return LedLuPair{(p - 1) / num_lus + 1, (p - 1) % num_lus + 1};
}

AlignmentState AlignmentState::zero(int num_elements, int num_leds, int num_lus) {
  AlignmentState s;
  s.q = IntMatrix::Zero(num_elements, num_leds * num_lus);
  s.num_leds = num_leds;
  s.num_lus = num_lus;
  return s;
}

std::optional<LedLuPair> AlignmentState::row_pair(int n) const {
  for (int p = 0; p < q.cols(); ++p) {
    if (q(n, p) != 0) return pair_indices(p + 1, num_leds, num_lus);
  }
  return std::nullopt;
}

IntMatrix AlignmentState::a() const {
  IntMatrix out = IntMatrix::Zero(q.rows(), num_lus);
  for (int n = 0; n < q.rows(); ++n) {
    if (const auto pair = row_pair(n)) out(n, pair->lu - 1) = 1;
  }
  return out;
}

IntMatrix AlignmentState::b() const {
  IntMatrix out = IntMatrix::Zero(q.rows(), num_leds);
  for (int n = 0; n < q.rows(); ++n) {
    if (const auto pair = row_pair(n)) out(n, pair->led - 1) = 1;
  }
  return out;
}

void AlignmentState::validate() const {
  std::ostringstream problems;
  if (q.cols() != num_leds * num_lus) problems << "column count must equal L*K; ";
  for (int n = 0; n < q.rows(); ++n) {
    int ones = 0;
    for (int p = 0; p < q.cols(); ++p) {
      if (q(n, p) != 0 && q(n, p) != 1) {
        problems << "entry (" << n << "," << p << ") not binary; ";
      }
      ones += q(n, p) != 0;
    }
    if (ones > 1) problems << "row " << n << " serves more than one pair; ";
  }
  const std::string s = problems.str();
  if (!s.empty()) throw std::invalid_argument("AlignmentState: " + s);
}

void RelaxedAlignment::validate() const {
  if (q_tilde.cols() != num_leds * num_lus) {
    throw std::invalid_argument("RelaxedAlignment: column count must equal L*K");
  }
  if ((q_tilde.array() < 0.0).any() || (q_tilde.array() > 1.0).any()) {
    throw std::invalid_argument("RelaxedAlignment: entries must lie in [0, 1]");
  }
}

AlignmentState project_alignment(const RelaxedAlignment& relaxed) {
  relaxed.validate();
  const int rows = static_cast<int>(relaxed.q_tilde.rows());
  const int cols = static_cast<int>(relaxed.q_tilde.cols());
  AlignmentState out = AlignmentState::zero(rows, relaxed.num_leds, relaxed.num_lus);
  for (int n = 0; n < rows; ++n) {
    int best = -1;
    double best_value = 0.0;
    for (int p = 0; p < cols; ++p) {
      const double v = relaxed.q_tilde(n, p);
      if (best < 0 || v > best_value) {
        best = p;
        best_value = v;
      }
    }
    // One-hot at p beats the zero row iff 1 - 2*q(n,p) < 0; ties keep the
    // zero row.
    if (best >= 0 && best_value > 0.5) out.q(n, best) = 1;
  }
  return out;
}

}  // namespace vlcsee
