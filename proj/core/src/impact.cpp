#include "lobimpact/impact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace lobimpact {

std::optional<ResponseStats> lag1_response(std::span<const MarketOrder> day, ResponseMode mode) {
  if (day.empty()) return std::nullopt;

  double spread_sum = 0.0;
  double r_sum = 0.0;
  double sq_sum = 0.0;  // V(1) accumulator, unsigned squared changes
  for (const MarketOrder& mo : day) {
    spread_sum += static_cast<double>(mo.spread_before) / kUnitsPerCent;
    r_sum += response_cents(mo, mode);
    double dm = mid_change_cents(mo);
    sq_sum += dm * dm;
  }

  const double n = static_cast<double>(day.size());
  ResponseStats out;
  out.mode = mode;
  out.n_mo = day.size();
  out.avg_spread_cents = spread_sum / n;
  out.r1_cents = r_sum / n;
  double v1 = sq_sum / n;
  out.sigma_r_cents = std::sqrt(std::max(0.0, v1 - out.r1_cents * out.r1_cents));
  return out;
}

ResponseStats combine(const ResponseStats& a, const ResponseStats& b) {
  if (a.mode != b.mode) throw std::invalid_argument("cannot combine stats of different modes");
  if (a.n_mo == 0) return b;
  if (b.n_mo == 0) return a;
  const double na = static_cast<double>(a.n_mo);
  const double nb = static_cast<double>(b.n_mo);
  const double n = na + nb;
  ResponseStats out;
  out.mode = a.mode;
  out.n_mo = a.n_mo + b.n_mo;
  out.avg_spread_cents = (na * a.avg_spread_cents + nb * b.avg_spread_cents) / n;
  out.r1_cents = (na * a.r1_cents + nb * b.r1_cents) / n;
  // V(1) mixes count-weighted; recover it from sigma^2 + R^2.
  double va = a.sigma_r_cents * a.sigma_r_cents + a.r1_cents * a.r1_cents;
  double vb = b.sigma_r_cents * b.sigma_r_cents + b.r1_cents * b.r1_cents;
  double v1 = (na * va + nb * vb) / n;
  out.sigma_r_cents = std::sqrt(std::max(0.0, v1 - out.r1_cents * out.r1_cents));
  return out;
}

double diffusion(std::span<const MarketOrder> orders, std::size_t lag) {
  if (orders.size() < lag + 1)
    throw std::invalid_argument("diffusion needs at least lag+1 orders");
  if (lag == 0) return 0.0;
  double sum = 0.0;
  std::size_t count = orders.size() - lag;
  for (std::size_t t = 0; t < count; ++t) {
    double dm = cents_between(orders[t].mid_before, orders[t + lag].mid_before);
    sum += dm * dm;
  }
  return sum / static_cast<double>(count);
}

std::vector<ImbalanceSample> order_flow_imbalance(std::span<const MarketOrder> orders,
                                                  std::size_t window, std::size_t stride) {
  if (window < 1) throw std::invalid_argument("imbalance window must be >= 1");
  if (stride < 1) throw std::invalid_argument("imbalance stride must be >= 1");
  std::vector<ImbalanceSample> samples;
  if (orders.size() < window) return samples;
  for (std::size_t t = 0; t + window <= orders.size(); t += stride) {
    ImbalanceSample s;
    s.t_start = t;
    for (std::size_t n = t; n < t + window; ++n)
      s.delta_v += static_cast<std::int64_t>(orders[n].sign) * orders[n].total_size;
    // mid_after_next of the window's last order IS the mid right before the
    // next order after the window (post-fill fallback on the day's last one).
    s.delta_m_cents =
        cents_between(orders[t].mid_before, orders[t + window - 1].mid_after_next);
    samples.push_back(s);
  }
  return samples;
}

namespace {

struct BinAccumulator {
  double x_sum = 0.0;
  double y_sum = 0.0;
  std::size_t count = 0;
};

ConditionedCurve curve_from_bins(const std::map<std::int64_t, BinAccumulator>& acc,
                                 double width, double offset, std::string binning) {
  ConditionedCurve curve;
  curve.binning = std::move(binning);
  curve.bins.reserve(acc.size());
  for (const auto& [idx, bin] : acc) {
    CurveBin b;
    b.center = (static_cast<double>(idx) + 0.5) * width + offset;
    b.mean_x = bin.x_sum / static_cast<double>(bin.count);
    b.mean_response = bin.y_sum / static_cast<double>(bin.count);
    b.count = bin.count;
    curve.bins.push_back(b);
  }
  return curve;
}

}  // namespace

ConditionedCurve volume_conditioned_response(std::span<const NormalizedMo> orders,
                                             ResponseMode mode) {
  constexpr double kSplit = 0.1;
  constexpr double kFineWidth = 0.01;
  constexpr double kCoarseWidth = 0.1;

  std::map<std::int64_t, BinAccumulator> fine;
  std::map<std::int64_t, BinAccumulator> coarse;
  for (const NormalizedMo& nm : orders) {
    double v = nm.v_norm;
    double r = response_cents(nm.mo, mode);
    if (v < kSplit) {
      auto& bin = fine[static_cast<std::int64_t>(std::floor(v / kFineWidth))];
      bin.x_sum += v;
      bin.y_sum += r;
      ++bin.count;
    } else {
      auto& bin = coarse[static_cast<std::int64_t>(std::floor(v / kCoarseWidth))];
      bin.x_sum += v;
      bin.y_sum += r;
      ++bin.count;
    }
  }

  ConditionedCurve curve =
      curve_from_bins(fine, kFineWidth, 0.0, "v_norm: 0.01 below 0.1, 0.1 above");
  ConditionedCurve upper = curve_from_bins(coarse, kCoarseWidth, 0.0, "");
  curve.bins.insert(curve.bins.end(), upper.bins.begin(), upper.bins.end());
  return curve;
}

ConditionedCurve aggregate_impact_curve(std::span<const ImbalanceSample> samples,
                                        double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be > 0");
  std::map<std::int64_t, BinAccumulator> acc;
  for (const ImbalanceSample& s : samples) {
    auto& bin = acc[static_cast<std::int64_t>(
        std::floor(static_cast<double>(s.delta_v) / bin_width))];
    bin.x_sum += static_cast<double>(s.delta_v);
    bin.y_sum += s.delta_m_cents;
    ++bin.count;
  }
  char label[64];
  std::snprintf(label, sizeof(label), "delta_v: width %g", bin_width);
  return curve_from_bins(acc, bin_width, 0.0, label);
}

std::vector<ImbalanceSample> filter_imbalance_outliers(std::span<const ImbalanceSample> samples,
                                                       double k) {
  if (samples.size() < 2) return {samples.begin(), samples.end()};
  std::vector<double> dv(samples.size());
  std::vector<double> dm(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    dv[i] = static_cast<double>(samples[i].delta_v);
    dm[i] = samples[i].delta_m_cents;
  }
  OutlierFilter fv = outlier_filter(dv, k);
  OutlierFilter fm = outlier_filter(dm, k);
  std::vector<bool> keep(samples.size(), false);
  for (std::size_t i : fv.kept) keep[i] = true;
  std::vector<ImbalanceSample> out;
  for (std::size_t i : fm.kept)
    if (keep[i]) out.push_back(samples[i]);
  return out;
}

}  // namespace lobimpact
