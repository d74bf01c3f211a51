#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lobimpact/preprocess.hpp"
#include "lobimpact/types.hpp"

namespace lobimpact {

// Arithmetic mean of the best quotes, exact to the half-unit.
inline MidPrice mid_price(const QuoteLevel& q) {
  return MidPrice{static_cast<std::int64_t>(q.ask_price) + q.bid_price};
}

// Volume-weighted mid where each price carries the opposite side's volume:
// (a*Vb + b*Va) / (Va + Vb), in 1e-4 dollar units.
inline double micro_price(const QuoteLevel& q) {
  double va = q.ask_volume;
  double vb = q.bid_volume;
  return (static_cast<double>(q.ask_price) * vb + static_cast<double>(q.bid_price) * va) /
         (va + vb);
}

// How the per-order mid move enters the lag-1 average.
//
// Signed keeps the sign-weighted change eps * (m_next - m); Clipped floors it
// at zero, reproducing the reference per-order recurrence exactly (its spread
// term, its unsigned squared-change accumulator, and its sigma formula). The
// two disagree whenever an order is followed by an adverse mid move; neither
// is chosen silently, callers always say which they want.
enum class ResponseMode { Signed, Clipped };

// Raw mid change between this order's arrival and the next order, in cents.
inline double mid_change_cents(const MarketOrder& mo) {
  return cents_between(mo.mid_before, mo.mid_after_next);
}
inline double signed_response_cents(const MarketOrder& mo) {
  return static_cast<double>(mo.sign) * mid_change_cents(mo);
}
inline double clipped_response_cents(const MarketOrder& mo) {
  double r = signed_response_cents(mo);
  return r > 0.0 ? r : 0.0;
}
inline double response_cents(const MarketOrder& mo, ResponseMode mode) {
  return mode == ResponseMode::Signed ? signed_response_cents(mo)
                                      : clipped_response_cents(mo);
}

// Daily lag-1 statistics, all in dollar cents.
// sigma_r = sqrt(V(1) - R(1)^2) with V(1) the mean unsigned squared mid
// change; with a clipped R(1) this is the reference recipe verbatim, not a
// textbook standard deviation.
struct ResponseStats {
  double avg_spread_cents = 0.0;
  double r1_cents = 0.0;
  double sigma_r_cents = 0.0;
  std::size_t n_mo = 0;
  ResponseMode mode = ResponseMode::Signed;
};

// Single pass over one day's orders. Empty input yields nullopt.
std::optional<ResponseStats> lag1_response(std::span<const MarketOrder> day, ResponseMode mode);

// Count-weighted merge of two partial results (same mode), used to fold
// chunks of one day computed in parallel.
ResponseStats combine(const ResponseStats& a, const ResponseStats& b);

// Mean squared mid fluctuation over `lag` orders, in cents^2.
// Throws std::invalid_argument with fewer than lag+1 orders.
double diffusion(std::span<const MarketOrder> orders, std::size_t lag);

// Signed volume over a window of T orders plus the mid move across it.
struct ImbalanceSample {
  std::int64_t delta_v = 0;      // shares, sum of sign * size over the window
  double delta_m_cents = 0.0;    // mid before next order after the window minus mid at start
  std::size_t t_start = 0;       // index of the window's first order
};

// Windows step by `stride` (stride == T gives disjoint windows) and only
// complete windows of T orders are emitted.
std::vector<ImbalanceSample> order_flow_imbalance(std::span<const MarketOrder> orders,
                                                  std::size_t window, std::size_t stride);
inline std::vector<ImbalanceSample> order_flow_imbalance(std::span<const MarketOrder> orders,
                                                         std::size_t window) {
  return order_flow_imbalance(orders, window, window);
}

struct CurveBin {
  double center = 0.0;   // geometric center of the bin interval
  double mean_x = 0.0;   // mean conditioning value of the samples in the bin
  double mean_response = 0.0;
  std::size_t count = 0;
};

struct ConditionedCurve {
  std::vector<CurveBin> bins;  // ascending by center, empty bins omitted
  std::string binning;

  std::size_t total_count() const {
    std::size_t n = 0;
    for (const CurveBin& b : bins) n += b.count;
    return n;
  }
};

// Lag-1 response binned against normalized volume, density-adaptive:
// 0.01-wide bins below v_norm = 0.1 and 0.1-wide bins from there up.
ConditionedCurve volume_conditioned_response(std::span<const NormalizedMo> orders,
                                             ResponseMode mode);

// Mean mid move per equal-width imbalance bin (bins anchored at 0).
ConditionedCurve aggregate_impact_curve(std::span<const ImbalanceSample> samples,
                                        double bin_width);

// 3-sigma (by default) filter applied to both coordinates; a sample
// survives only if delta_v and delta_m both do.
std::vector<ImbalanceSample> filter_imbalance_outliers(std::span<const ImbalanceSample> samples,
                                                       double k = 3.0);

}  // namespace lobimpact
