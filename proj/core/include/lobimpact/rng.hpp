#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lobimpact {

// Seeded randomness with fixed semantics. The raw generator is std::mt19937_64
// (its sequence is pinned by the standard); every mapping on top of it is
// implemented here instead of via std::*_distribution, whose outputs are
// implementation-defined and would break same-seed reproducibility across
// toolchains. normal() and exponential() go through det_log()/sqrt only,
// which are exact in IEEE-754 double arithmetic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Unbiased integer in [0, n) via rejection sampling.
  std::uint64_t below(std::uint64_t n);

  // Inclusive range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // 53-bit uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool coin() { return (next_u64() & 1) != 0; }
  int sign() { return coin() ? 1 : -1; }

  // Marsaglia polar method; one spare kept between calls.
  double normal(double mean = 0.0, double stddev = 1.0);

  // Inverse-CDF exponential with the given rate (mean 1/rate).
  double exponential(double rate);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Natural log computed from +,-,*,/ only (argument reduction to [0.5,1) plus
// an atanh series), so results do not depend on the platform libm. Agrees
// with std::log to ~1 ulp over normalized doubles. Requires x > 0 finite.
double det_log(double x);

// Fisher-Yates with Rng::below; the only shuffle used anywhere.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

}  // namespace lobimpact
