#pragma once

#include <span>
#include <vector>

#include "lobimpact/types.hpp"

namespace lobimpact {

// Half-open trading window [start, end) in ns after midnight.
struct SessionWindow {
  TimeNs start = 0;
  TimeNs end = kNsPerDay;

  static SessionWindow from_seconds(double start_s, double end_s);
  // Auction-free core session used throughout: 10:30-15:00.
  static SessionWindow default_window();

  bool contains(TimeNs t) const { return start <= t && t < end; }
};

// Keeps exactly the events with start <= time < end, snapshots aligned.
MergedStream clip_session(const MergedStream& stream, SessionWindow window);

// Groups consecutive execution rows (types 4/5) that share timestamp and
// direction into single market orders. Pre-order book state (mid, spread,
// opposite best volume) comes from the snapshot before the first fill;
// mid_after_next is the mid right before the next MO, falling back to the
// post-fill mid for the day's last order (flagged last_of_day).
std::vector<MarketOrder> reconstruct_market_orders(const MergedStream& stream);

struct OutlierFilter {
  std::vector<std::size_t> kept;  // indices into the input, ascending
  std::size_t removed = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

// Retains x with |x - mean| <= k * stddev (population stddev over the full
// input). Throws std::invalid_argument when fewer than 2 samples.
OutlierFilter outlier_filter(std::span<const double> samples, double k = 3.0);

struct OutlierResult {
  std::vector<double> kept;
  std::size_t removed = 0;
};

OutlierResult remove_outliers(std::span<const double> samples, double k = 3.0);

// Mean pre-order opposite-side best volume; the per-day normalizer.
double daily_mean_opposite_best_volume(std::span<const MarketOrder> day);

struct NormalizedMo {
  MarketOrder mo;
  double v_norm = 0.0;  // total_size / day's mean opposite best volume
};

std::vector<NormalizedMo> normalize_volumes(std::span<const MarketOrder> day,
                                            double mean_best_volume);

// Multi-day driver: each day is normalized by its own mean. Days with no
// orders are skipped and reported by index.
struct DayNormalization {
  std::vector<std::vector<NormalizedMo>> days;
  std::vector<std::size_t> skipped_days;
};

DayNormalization normalize_volumes_per_day(const std::vector<std::vector<MarketOrder>>& days);

}  // namespace lobimpact
