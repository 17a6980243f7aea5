// SPDX-License-Identifier: Apache-2.0
//
// Element-to-link assignment for the reflector array. Each element may
// serve at most one (LED, user) pair; the assignment is carried as a
// binary matrix with one column per pair, plus a relaxed [0,1] form used
// by the continuous action space.
#pragma once

#include <optional>

#include "vlcsee/linalg.hpp"

namespace vlcsee {

struct LedLuPair {
  int led;  // 1-based
  int lu;   // 1-based
};

// Column index p = lu + (led - 1) * num_lus, 1-based.
int merged_index(int led, int lu, int num_lus);

// Inverse of merged_index. Throws std::out_of_range unless 1 <= p <= L*K.
LedLuPair pair_indices(int p, int num_leds, int num_lus);

struct AlignmentState {
  IntMatrix q;  // N x (L*K), binary, each row has at most one 1
  int num_leds = 0;
  int num_lus = 0;

  int num_elements() const { return static_cast<int>(q.rows()); }
  int num_pairs() const { return num_leds * num_lus; }

  static AlignmentState zero(int num_elements, int num_leds, int num_lus);

  // Pair served by element n (0-based row), if any.
  std::optional<LedLuPair> row_pair(int n) const;

  IntMatrix a() const;  // N x K, element-to-user
  IntMatrix b() const;  // N x L, LED-to-element

  void validate() const;  // throws std::invalid_argument on broken invariants
};

struct RelaxedAlignment {
  Matrix q_tilde;  // N x (L*K), entries in [0, 1]
  int num_leds = 0;
  int num_lus = 0;

  void validate() const;
};

// Per-row minimum-distance projection onto {zero row, one-hot rows}.
// Closed form: take the row maximum; emit its one-hot iff it exceeds 1/2,
// otherwise the zero row. Ties resolve to the zero row first, then to the
// lowest column index.
AlignmentState project_alignment(const RelaxedAlignment& relaxed);

}  // namespace vlcsee
