#pragma once

#include <span>
#include <string>
#include <vector>

#include "lobimpact/types.hpp"

namespace lobimpact {

// One executed trade as seen by the bar sampler: its print plus the mid
// prevailing when it happened (OHLC tracks mids, turnover tracks prints).
struct Trade {
  TimeNs time = 0;
  Price price = 0;
  Shares size = 0;
  MidPrice mid;
};

enum class BarKind { Time, Tick, Volume, Dollar };

BarKind bar_kind_from_string(const std::string& name);
std::string to_string(BarKind kind);

struct BarSpec {
  BarKind kind = BarKind::Volume;
  // Time: bucket length in ns; Tick: trades per bar; Volume: shares;
  // Dollar: turnover in 1e-4 dollars * shares.
  std::int64_t threshold = 0;
};

struct Bar {
  TimeNs start_time = 0;  // first trade in the bar
  TimeNs end_time = 0;    // last trade in the bar
  MidPrice open, high, low, close;
  std::int64_t traded_volume = 0;
  std::int64_t traded_dollar = 0;  // sum of price * size, 1e-4 dollars * shares
  int n_events = 0;
  // Trailing bar that ended with the input instead of meeting its threshold.
  bool partial = false;

  double vwap_units() const {
    return static_cast<double>(traded_dollar) / static_cast<double>(traded_volume);
  }
};

// Folds trades into bars. Every trade lands in exactly one bar (the trade
// that crosses a volume/dollar threshold closes its bar; counters reset to
// zero). Throws std::invalid_argument on a non-positive threshold.
std::vector<Bar> sample_bars(std::span<const Trade> trades, const BarSpec& spec);

// Execution rows of a merged stream, mid taken from the post-event snapshot.
std::vector<Trade> trades_from_stream(const MergedStream& stream);

// One synthetic print per market order at the pre-order opposite best quote.
std::vector<Trade> trades_from_market_orders(std::span<const MarketOrder> orders);

}  // namespace lobimpact
