#include <doctest.h>

#include "fixtures.hpp"
#include "lobimpact/bars.hpp"

using namespace lobimpact;

namespace {

Trade make_trade(TimeNs t, Price price, Shares size) {
  return Trade{t, price, size, MidPrice{2LL * price}};
}

std::vector<Trade> random_trades(Rng& rng, std::size_t n) {
  std::vector<Trade> trades;
  TimeNs t = TimeNs{40'000} * kNsPerSecond;
  for (std::size_t i = 0; i < n; ++i) {
    t += rng.uniform_int(1, 2 * kNsPerSecond);
    Price p = static_cast<Price>(2'000'000 + rng.uniform_int(-50, 50) * 100);
    trades.push_back(Trade{t, p, static_cast<Shares>(rng.uniform_int(1, 500)),
                           MidPrice{2LL * p + rng.uniform_int(-100, 100) * 2}});
  }
  return trades;
}

void check_partition(const std::vector<Trade>& trades, const std::vector<Bar>& bars) {
  std::int64_t volume = 0;
  std::int64_t dollar = 0;
  std::int64_t events = 0;
  for (const Bar& b : bars) {
    CHECK(b.n_events >= 1);
    CHECK(b.low <= b.open);
    CHECK(b.low <= b.close);
    CHECK(b.open <= b.high);
    CHECK(b.close <= b.high);
    CHECK(b.start_time <= b.end_time);
    volume += b.traded_volume;
    dollar += b.traded_dollar;
    events += b.n_events;
  }
  std::int64_t in_volume = 0;
  std::int64_t in_dollar = 0;
  for (const Trade& t : trades) {
    in_volume += t.size;
    in_dollar += static_cast<std::int64_t>(t.price) * t.size;
  }
  CHECK(volume == in_volume);
  CHECK(dollar == in_dollar);
  CHECK(events == static_cast<std::int64_t>(trades.size()));
}

}  // namespace

TEST_CASE("volume bars close with the crossing trade and reset to zero") {
  std::vector<Trade> trades{make_trade(1, 1000, 60), make_trade(2, 1000, 50),
                            make_trade(3, 1000, 30), make_trade(4, 1000, 70)};
  auto bars = sample_bars(trades, BarSpec{BarKind::Volume, 100});
  REQUIRE(bars.size() == 2);
  CHECK(bars[0].traded_volume == 110);
  CHECK(bars[0].n_events == 2);
  CHECK(bars[1].traded_volume == 100);
  CHECK(bars[1].n_events == 2);
  CHECK_FALSE(bars[0].partial);
  CHECK_FALSE(bars[1].partial);  // met the threshold exactly
}

TEST_CASE("tick bars of one trade each") {
  std::vector<Trade> trades{make_trade(1, 1000, 5), make_trade(2, 1100, 7)};
  auto bars = sample_bars(trades, BarSpec{BarKind::Tick, 1});
  REQUIRE(bars.size() == 2);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    CHECK(bars[i].open == bars[i].high);
    CHECK(bars[i].high == bars[i].low);
    CHECK(bars[i].low == bars[i].close);
    CHECK(bars[i].n_events == 1);
  }
}

TEST_CASE("dollar bars equal volume bars at constant price") {
  Rng rng(31);
  std::vector<Trade> trades;
  TimeNs t = 0;
  for (int i = 0; i < 200; ++i) {
    t += rng.uniform_int(1, 1000);
    trades.push_back(make_trade(t, 500, static_cast<Shares>(rng.uniform_int(1, 100))));
  }
  const std::int64_t volume_threshold = 150;
  auto volume_bars = sample_bars(trades, BarSpec{BarKind::Volume, volume_threshold});
  auto dollar_bars = sample_bars(trades, BarSpec{BarKind::Dollar, volume_threshold * 500});
  REQUIRE(volume_bars.size() == dollar_bars.size());
  for (std::size_t i = 0; i < volume_bars.size(); ++i) {
    CHECK(volume_bars[i].n_events == dollar_bars[i].n_events);
    CHECK(volume_bars[i].traded_volume == dollar_bars[i].traded_volume);
    CHECK(volume_bars[i].start_time == dollar_bars[i].start_time);
  }
}

TEST_CASE("trailing partial bar is flagged") {
  std::vector<Trade> trades{make_trade(1, 1000, 60), make_trade(2, 1000, 10)};
  auto bars = sample_bars(trades, BarSpec{BarKind::Volume, 100});
  REQUIRE(bars.size() == 1);
  CHECK(bars[0].partial);
  CHECK(bars[0].traded_volume == 70);

  auto ticks = sample_bars(trades, BarSpec{BarKind::Tick, 3});
  REQUIRE(ticks.size() == 1);
  CHECK(ticks[0].partial);
}

TEST_CASE("time bars bucket by wall clock and omit empty buckets") {
  std::vector<Trade> trades{make_trade(10, 1000, 1), make_trade(15, 1000, 2),
                            make_trade(47, 1000, 3)};  // bucket 1 empty at width 10
  auto bars = sample_bars(trades, BarSpec{BarKind::Time, 10});
  REQUIRE(bars.size() == 2);
  CHECK(bars[0].n_events == 2);
  CHECK(bars[0].start_time == 10);
  CHECK(bars[0].end_time == 15);
  CHECK(bars[1].n_events == 1);
}

TEST_CASE("bars partition the input for every kind") {
  Rng rng(37);
  for (int round = 0; round < 10; ++round) {
    auto trades = random_trades(rng, 1 + static_cast<std::size_t>(rng.below(400)));
    for (BarKind kind : {BarKind::Time, BarKind::Tick, BarKind::Volume, BarKind::Dollar}) {
      std::int64_t threshold = 0;
      switch (kind) {
        case BarKind::Time: threshold = 30 * kNsPerSecond; break;
        case BarKind::Tick: threshold = 7; break;
        case BarKind::Volume: threshold = 900; break;
        case BarKind::Dollar: threshold = 900LL * 2'000'000; break;
      }
      auto bars = sample_bars(trades, BarSpec{kind, threshold});
      check_partition(trades, bars);
    }
  }
}

TEST_CASE("vwap is the exact trade-dollar ratio and sits inside the price range") {
  Rng rng(41);
  auto trades = random_trades(rng, 300);
  auto bars = sample_bars(trades, BarSpec{BarKind::Tick, 9});
  std::size_t at = 0;
  for (const Bar& bar : bars) {
    std::int64_t dollar = 0;
    std::int64_t volume = 0;
    Price lo = std::numeric_limits<Price>::max();
    Price hi = std::numeric_limits<Price>::min();
    for (int k = 0; k < bar.n_events; ++k, ++at) {
      dollar += static_cast<std::int64_t>(trades[at].price) * trades[at].size;
      volume += trades[at].size;
      lo = std::min(lo, trades[at].price);
      hi = std::max(hi, trades[at].price);
    }
    CHECK(bar.vwap_units() == doctest::Approx(static_cast<double>(dollar) /
                                              static_cast<double>(volume)));
    CHECK(bar.vwap_units() >= static_cast<double>(lo));
    CHECK(bar.vwap_units() <= static_cast<double>(hi));
  }
}

TEST_CASE("non-positive thresholds are rejected") {
  std::vector<Trade> trades{make_trade(1, 1000, 1)};
  CHECK_THROWS_AS(sample_bars(trades, BarSpec{BarKind::Volume, 0}), std::invalid_argument);
  CHECK_THROWS_AS(sample_bars(trades, BarSpec{BarKind::Time, -5}), std::invalid_argument);
}

TEST_CASE("trades derive from streams and market orders") {
  auto stream = fixtures::sample_stream();
  auto trades = trades_from_stream(stream);
  REQUIRE(trades.size() == 4);  // three visible fills + one hidden
  CHECK(trades[0].size == 5);
  CHECK(trades[3].size == 300);

  MarketOrder buy = fixtures::make_mo(+1, 10000, 0.0, 2.0, 50, 100);
  MarketOrder sell = fixtures::make_mo(-1, 10000, 0.0, 2.0, 50, 100);
  auto prints = trades_from_market_orders(std::vector<MarketOrder>{buy, sell});
  // Buy prints at the ask (mid + half spread), sell at the bid.
  CHECK(prints[0].price == 10000 * 100 + 100);
  CHECK(prints[1].price == 10000 * 100 - 100);
}
