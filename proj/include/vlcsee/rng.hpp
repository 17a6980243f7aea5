// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>

namespace vlcsee {

// splitmix64 round; used to derive independent seed streams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded generator with explicit uniform/gaussian draws so that sequences
// are reproducible independent of the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  int uniform_int(int n) {
    const std::uint64_t bound = ~std::uint64_t{0} - (~std::uint64_t{0} % static_cast<std::uint64_t>(n));
    std::uint64_t x = gen_();
    while (x >= bound) x = gen_();
    return static_cast<int>(x % static_cast<std::uint64_t>(n));
  }

  // N(0, 1) via Box-Muller.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Textual engine state, for checkpoints. The cached draw travels as its
  // bit pattern so the round trip is exact.
  friend std::ostream& operator<<(std::ostream& out, const Rng& rng) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &rng.spare_, sizeof(bits));
    return out << rng.gen_ << ' ' << rng.has_spare_ << ' ' << bits;
  }
  friend std::istream& operator>>(std::istream& in, Rng& rng) {
    std::uint64_t bits = 0;
    in >> rng.gen_ >> rng.has_spare_ >> bits;
    std::memcpy(&rng.spare_, &bits, sizeof(bits));
    return in;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vlcsee
