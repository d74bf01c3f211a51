#include "lobimpact/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace lobimpact {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  // Reject the tail that would bias the modulo.
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
  for (;;) {
    std::uint64_t x = next_u64();
    if (x <= limit) return x % n;
  }
}

double det_log(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("det_log: need finite x > 0");
  // x = m * 2^e with m in [0.5, 1); frexp is exact.
  int e = 0;
  double m = std::frexp(x, &e);
  // ln(m) = 2 * atanh(z), z = (m-1)/(m+1), |z| <= 1/3 on [0.5, 1).
  double z = (m - 1.0) / (m + 1.0);
  double z2 = z * z;
  double term = z;
  double sum = z;
  for (int k = 3; k <= 35; k += 2) {
    term *= z2;
    sum += term / static_cast<double>(k);
  }
  constexpr double kLn2 = 0.6931471805599453094172321214581766;
  return 2.0 * sum + static_cast<double>(e) * kLn2;
}

double Rng::normal(double mean, double stddev) {
  if (have_spare_) {
    have_spare_ = false;
    return mean + stddev * spare_;
  }
  for (;;) {
    double u = 2.0 * uniform01() - 1.0;
    double v = 2.0 * uniform01() - 1.0;
    double s = u * u + v * v;
    if (s <= 0.0 || s >= 1.0) continue;
    double f = std::sqrt(-2.0 * det_log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return mean + stddev * (u * f);
  }
}

double Rng::exponential(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("exponential rate must be > 0");
  // 1 - uniform01() is in (2^-53, 1], keeping the log finite.
  return -det_log(1.0 - uniform01()) / rate;
}

}  // namespace lobimpact
