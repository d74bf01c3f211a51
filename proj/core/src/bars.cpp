#include "lobimpact/bars.hpp"

#include <algorithm>
#include <stdexcept>

#include "lobimpact/impact.hpp"

namespace lobimpact {

BarKind bar_kind_from_string(const std::string& name) {
  if (name == "time") return BarKind::Time;
  if (name == "tick") return BarKind::Tick;
  if (name == "volume") return BarKind::Volume;
  if (name == "dollar") return BarKind::Dollar;
  throw std::invalid_argument("unknown bar kind '" + name + "'");
}

std::string to_string(BarKind kind) {
  switch (kind) {
    case BarKind::Time: return "time";
    case BarKind::Tick: return "tick";
    case BarKind::Volume: return "volume";
    case BarKind::Dollar: return "dollar";
  }
  return "?";
}

namespace {

struct BarBuilder {
  Bar bar;
  bool open = false;

  void add(const Trade& t) {
    if (!open) {
      bar = Bar{};
      bar.start_time = t.time;
      bar.open = bar.high = bar.low = t.mid;
      open = true;
    }
    bar.end_time = t.time;
    bar.close = t.mid;
    bar.high = std::max(bar.high, t.mid);
    bar.low = std::min(bar.low, t.mid);
    bar.traded_volume += t.size;
    bar.traded_dollar += static_cast<std::int64_t>(t.price) * t.size;
    bar.n_events += 1;
  }

  Bar close(bool partial) {
    bar.partial = partial;
    open = false;
    return bar;
  }
};

}  // namespace

std::vector<Bar> sample_bars(std::span<const Trade> trades, const BarSpec& spec) {
  if (spec.threshold <= 0) throw std::invalid_argument("bar threshold must be > 0");

  std::vector<Bar> bars;
  BarBuilder builder;

  switch (spec.kind) {
    case BarKind::Time: {
      std::int64_t bucket = -1;
      for (const Trade& t : trades) {
        std::int64_t b = t.time / spec.threshold;
        if (builder.open && b != bucket) bars.push_back(builder.close(false));
        bucket = b;
        builder.add(t);
      }
      // Wall clock closes the final bucket when the day's input ends.
      if (builder.open) bars.push_back(builder.close(false));
      break;
    }
    case BarKind::Tick: {
      for (const Trade& t : trades) {
        builder.add(t);
        if (builder.bar.n_events >= spec.threshold) bars.push_back(builder.close(false));
      }
      if (builder.open) bars.push_back(builder.close(true));
      break;
    }
    case BarKind::Volume: {
      for (const Trade& t : trades) {
        builder.add(t);
        if (builder.bar.traded_volume >= spec.threshold) bars.push_back(builder.close(false));
      }
      if (builder.open) bars.push_back(builder.close(true));
      break;
    }
    case BarKind::Dollar: {
      for (const Trade& t : trades) {
        builder.add(t);
        if (builder.bar.traded_dollar >= spec.threshold) bars.push_back(builder.close(false));
      }
      if (builder.open) bars.push_back(builder.close(true));
      break;
    }
  }
  return bars;
}

std::vector<Trade> trades_from_stream(const MergedStream& stream) {
  std::vector<Trade> trades;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const EventRecord& e = stream.events[i];
    if (!e.is_execution()) continue;
    trades.push_back(Trade{e.time, e.price, e.size, mid_price(stream.books.best(i))});
  }
  return trades;
}

std::vector<Trade> trades_from_market_orders(std::span<const MarketOrder> orders) {
  std::vector<Trade> trades;
  trades.reserve(orders.size());
  for (const MarketOrder& mo : orders) {
    // A buy order prints at the pre-order ask, a sell at the bid; both are
    // whole units because ask+bid and ask-bid share parity.
    std::int64_t px2 = mo.mid_before.twice + mo.sign * static_cast<std::int64_t>(mo.spread_before);
    Trade t;
    t.time = mo.time;
    t.price = static_cast<Price>(px2 / 2);
    t.size = static_cast<Shares>(std::min<std::int64_t>(mo.total_size, INT32_MAX));
    t.mid = mo.mid_before;
    trades.push_back(t);
  }
  return trades;
}

}  // namespace lobimpact
