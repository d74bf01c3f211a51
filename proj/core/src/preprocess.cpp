#include "lobimpact/preprocess.hpp"

#include <cmath>
#include <stdexcept>

#include "lobimpact/impact.hpp"

namespace lobimpact {

SessionWindow SessionWindow::from_seconds(double start_s, double end_s) {
  SessionWindow w{static_cast<TimeNs>(start_s * kNsPerSecond),
                  static_cast<TimeNs>(end_s * kNsPerSecond)};
  if (w.start < 0 || w.end > kNsPerDay || w.start >= w.end)
    throw std::invalid_argument("session window must satisfy 0 <= start < end <= 86400s");
  return w;
}

SessionWindow SessionWindow::default_window() {
  return SessionWindow{(TimeNs{10} * 3600 + TimeNs{30} * 60) * kNsPerSecond,
                       TimeNs{15} * 3600 * kNsPerSecond};
}

MergedStream clip_session(const MergedStream& stream, SessionWindow window) {
  if (window.start < 0 || window.end > kNsPerDay || window.start >= window.end)
    throw std::invalid_argument("session window must satisfy 0 <= start < end <= 86400s");
  MergedStream out;
  out.meta = stream.meta;
  out.books = SnapshotSeries(stream.books.depth());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!window.contains(stream.events[i].time)) continue;
    out.events.push_back(stream.events[i]);
    out.books.push_row(stream.books.row(i));
  }
  return out;
}

namespace {

MidPrice mid_of(const MergedStream& s, std::size_t row) {
  return mid_price(s.books.best(row));
}

// State immediately before event i is the snapshot after event i-1; for the
// very first row no prior state exists and the post-event snapshot stands in.
std::size_t pre_row(std::size_t i) { return i == 0 ? 0 : i - 1; }

}  // namespace

std::vector<MarketOrder> reconstruct_market_orders(const MergedStream& stream) {
  std::vector<MarketOrder> orders;

  std::size_t i = 0;
  const std::size_t n = stream.size();
  while (i < n) {
    const EventRecord& first = stream.events[i];
    if (!first.is_execution()) {
      ++i;
      continue;
    }
    if (first.direction != 1 && first.direction != -1)
      throw StreamValidationError(i, "execution row with direction outside {+1,-1}");

    MarketOrder mo;
    mo.time = first.time;
    mo.sign = -static_cast<int>(first.direction);

    std::size_t j = i;
    while (j < n && stream.events[j].is_execution() && stream.events[j].time == first.time &&
           stream.events[j].direction == first.direction) {
      const EventRecord& fill = stream.events[j];
      if (fill.direction != 1 && fill.direction != -1)
        throw StreamValidationError(j, "execution row with direction outside {+1,-1}");
      mo.total_size += fill.size;
      mo.n_fills += 1;
      mo.contains_hidden |= fill.type == EventType::ExecHidden;
      ++j;
    }

    const QuoteLevel& before = stream.books.best(pre_row(i));
    mo.mid_before = mid_price(before);
    mo.spread_before = before.spread();
    mo.opposite_best_volume_before = mo.sign > 0 ? before.ask_volume : before.bid_volume;
    mo.price_changing = mo.total_size >= mo.opposite_best_volume_before;

    // Fallback until the next MO is known.
    mo.mid_after_next = mid_of(stream, j - 1);
    mo.last_of_day = true;

    if (!orders.empty()) {
      orders.back().mid_after_next = mid_of(stream, pre_row(i));
      orders.back().last_of_day = false;
    }
    orders.push_back(mo);
    i = j;
  }
  return orders;
}

OutlierFilter outlier_filter(std::span<const double> samples, double k) {
  if (samples.size() < 2)
    throw std::invalid_argument("outlier filter needs at least 2 samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size());

  OutlierFilter out;
  out.mean = mean;
  out.stddev = std::sqrt(var);
  double bound = k * out.stddev;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (std::abs(samples[i] - mean) <= bound) {
      out.kept.push_back(i);
    } else {
      ++out.removed;
    }
  }
  return out;
}

OutlierResult remove_outliers(std::span<const double> samples, double k) {
  OutlierFilter f = outlier_filter(samples, k);
  OutlierResult out;
  out.removed = f.removed;
  out.kept.reserve(f.kept.size());
  for (std::size_t idx : f.kept) out.kept.push_back(samples[idx]);
  return out;
}

double daily_mean_opposite_best_volume(std::span<const MarketOrder> day) {
  if (day.empty()) return 0.0;
  double sum = 0.0;
  for (const MarketOrder& mo : day) sum += static_cast<double>(mo.opposite_best_volume_before);
  return sum / static_cast<double>(day.size());
}

std::vector<NormalizedMo> normalize_volumes(std::span<const MarketOrder> day,
                                            double mean_best_volume) {
  if (!(mean_best_volume > 0.0))
    throw std::invalid_argument("mean opposite best volume must be > 0");
  std::vector<NormalizedMo> out;
  out.reserve(day.size());
  for (const MarketOrder& mo : day)
    out.push_back(NormalizedMo{mo, static_cast<double>(mo.total_size) / mean_best_volume});
  return out;
}

DayNormalization normalize_volumes_per_day(const std::vector<std::vector<MarketOrder>>& days) {
  DayNormalization out;
  for (std::size_t d = 0; d < days.size(); ++d) {
    if (days[d].empty()) {
      out.skipped_days.push_back(d);
      continue;
    }
    out.days.push_back(normalize_volumes(days[d], daily_mean_opposite_best_volume(days[d])));
  }
  return out;
}

}  // namespace lobimpact
