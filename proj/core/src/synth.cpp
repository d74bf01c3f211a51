#include "lobimpact/synth.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "lobimpact/rng.hpp"

namespace lobimpact {
namespace {

struct RestingOrder {
  std::int64_t id = 0;
  Shares size = 0;
};

using OrderQueue = std::list<RestingOrder>;

// One side of the book: price levels in best-first order, FIFO queues within
// a level. Level volume is cached so snapshots stay O(depth), and orders are
// erased through stored list iterators so cancellations stay O(log levels).
template <typename Compare>
class BookSide {
 public:
  struct Level {
    OrderQueue queue;
    std::int64_t volume = 0;
  };

  bool empty() const { return levels_.empty(); }
  std::size_t level_count() const { return levels_.size(); }
  Price best_price() const { return levels_.begin()->first; }

  OrderQueue::iterator add(Price price, RestingOrder order) {
    Level& level = levels_[price];
    level.queue.push_back(order);
    level.volume += order.size;
    return std::prev(level.queue.end());
  }

  // Pops the oldest order at the best price; erases the level when empty.
  RestingOrder pop_best() {
    auto it = levels_.begin();
    RestingOrder order = it->second.queue.front();
    it->second.queue.pop_front();
    it->second.volume -= order.size;
    if (it->second.queue.empty()) levels_.erase(it);
    return order;
  }

  void erase(Price price, OrderQueue::iterator at) {
    auto it = levels_.find(price);
    it->second.volume -= at->size;
    it->second.queue.erase(at);
    if (it->second.queue.empty()) levels_.erase(it);
  }

  // Best-first traversal of up to n levels.
  template <typename Fn>
  void visit_levels(int n, Fn&& fn) const {
    int filled = 0;
    for (auto it = levels_.begin(); it != levels_.end() && filled < n; ++it, ++filled)
      fn(filled, it->first, static_cast<Shares>(it->second.volume));
  }

  std::int64_t total_volume() const {
    std::int64_t v = 0;
    for (const auto& [price, level] : levels_) v += level.volume;
    return v;
  }

 private:
  std::map<Price, Level, Compare> levels_;
};

struct OrderLoc {
  Price price = 0;
  std::int8_t side = 0;  // +1 bid, -1 ask
  OrderQueue::iterator at;
};

class ZiSimulator {
 public:
  explicit ZiSimulator(const ZiConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    if (cfg.lo_rate <= 0 || cfg.mo_rate < 0 || cfg.cancel_rate < 0)
      throw std::invalid_argument("arrival rates must be positive (mo/cancel may be zero)");
    if (cfg.tick <= 0 || cfg.lot <= 0) throw std::invalid_argument("tick and lot must be > 0");
    if (cfg.band_ticks < 1 || cfg.seed_lots_per_level < 1 || cfg.depth < 1)
      throw std::invalid_argument("band, seed lots and depth must be >= 1");
  }

  ZiResult run() {
    seed_book();

    ZiResult result;
    result.stream.meta = StreamMeta{cfg_.ticker, cfg_.date, cfg_.depth};
    result.stream.books = SnapshotSeries(cfg_.depth);

    const double total_rate = cfg_.lo_rate + cfg_.mo_rate + cfg_.cancel_rate;
    TimeNs t = cfg_.session.start;
    for (;;) {
      double gap_s = rng_.exponential(total_rate);
      TimeNs gap = std::max<TimeNs>(1, std::llround(gap_s * static_cast<double>(kNsPerSecond)));
      t += gap;
      if (t >= cfg_.session.end) break;

      double pick = rng_.uniform01() * total_rate;
      EventRecord event;
      if (pick < cfg_.lo_rate) {
        event = submit_limit_order(t);
      } else if (pick < cfg_.lo_rate + cfg_.mo_rate) {
        event = execute_market_order(t);
      } else {
        event = cancel_random_order(t);
      }
      result.stream.events.push_back(event);
      append_snapshot(result.stream.books, t);
    }

    result.stats = stats_;
    result.stats.resting_volume_end = bids_.total_volume() + asks_.total_volume();
    return result;
  }

 private:
  void seed_book() {
    Price bid0 = cfg_.initial_mid - cfg_.tick;
    Price ask0 = cfg_.initial_mid + cfg_.tick;
    for (int lvl = 0; lvl < cfg_.band_ticks; ++lvl) {
      for (int i = 0; i < cfg_.seed_lots_per_level; ++i) {
        place(bid0 - lvl * cfg_.tick, +1);
        place(ask0 + lvl * cfg_.tick, -1);
      }
    }
  }

  std::int64_t place(Price price, std::int8_t side) {
    std::int64_t id = next_id_++;
    OrderQueue::iterator at = side > 0 ? bids_.add(price, RestingOrder{id, cfg_.lot})
                                       : asks_.add(price, RestingOrder{id, cfg_.lot});
    locs_[id] = OrderLoc{price, side, at};
    live_.push_back(id);
    pos_[id] = live_.size() - 1;
    stats_.submitted_volume += cfg_.lot;
    return id;
  }

  void forget(std::int64_t id) {
    std::size_t at = pos_.at(id);
    std::int64_t moved = live_.back();
    live_[at] = moved;
    pos_[moved] = at;
    live_.pop_back();
    pos_.erase(id);
    locs_.erase(id);
  }

  EventRecord submit_limit_order(TimeNs t) {
    std::int8_t side = rng_.coin() ? std::int8_t{1} : std::int8_t{-1};
    int offset = static_cast<int>(rng_.uniform_int(1, cfg_.band_ticks));
    Price price;
    if (side > 0) {
      require_nonempty(t);
      price = asks_.best_price() - static_cast<Price>(offset) * cfg_.tick;
    } else {
      require_nonempty(t);
      price = bids_.best_price() + static_cast<Price>(offset) * cfg_.tick;
    }
    if (price <= 0) price = cfg_.tick;
    std::int64_t id = place(price, side);
    return EventRecord{t, id, price, cfg_.lot, EventType::Submission, side};
  }

  EventRecord execute_market_order(TimeNs t) {
    require_nonempty(t);
    bool buy_mo = rng_.coin();
    // A buy MO lifts the best ask (a resting sell LO, direction -1).
    if (buy_mo) {
      Price price = asks_.best_price();
      RestingOrder order = asks_.pop_best();
      forget(order.id);
      stats_.executed_volume += order.size;
      return EventRecord{t, order.id, price, order.size, EventType::ExecVisible, -1};
    }
    Price price = bids_.best_price();
    RestingOrder order = bids_.pop_best();
    forget(order.id);
    stats_.executed_volume += order.size;
    return EventRecord{t, order.id, price, order.size, EventType::ExecVisible, +1};
  }

  EventRecord cancel_random_order(TimeNs t) {
    require_nonempty(t);
    std::int64_t id = live_[static_cast<std::size_t>(rng_.below(live_.size()))];
    OrderLoc loc = locs_.at(id);
    if (loc.side > 0) {
      bids_.erase(loc.price, loc.at);
    } else {
      asks_.erase(loc.price, loc.at);
    }
    forget(id);
    stats_.cancelled_volume += cfg_.lot;
    return EventRecord{t, id, loc.price, cfg_.lot, EventType::Deletion, loc.side};
  }

  void require_nonempty(TimeNs t) const {
    if (bids_.empty() || asks_.empty())
      throw SimulationHaltError(t, "book side emptied at t=" +
                                       std::to_string(static_cast<double>(t) / kNsPerSecond) + "s");
  }

  void append_snapshot(SnapshotSeries& books, TimeNs t) {
    if (static_cast<int>(bids_.level_count()) < cfg_.depth ||
        static_cast<int>(asks_.level_count()) < cfg_.depth)
      throw SimulationHaltError(
          t, "book thinner than requested depth at t=" +
                 std::to_string(static_cast<double>(t) / kNsPerSecond) + "s");
    row_.assign(static_cast<std::size_t>(cfg_.depth), QuoteLevel{});
    asks_.visit_levels(cfg_.depth, [&](int lvl, Price price, Shares volume) {
      row_[static_cast<std::size_t>(lvl)].ask_price = price;
      row_[static_cast<std::size_t>(lvl)].ask_volume = volume;
    });
    bids_.visit_levels(cfg_.depth, [&](int lvl, Price price, Shares volume) {
      row_[static_cast<std::size_t>(lvl)].bid_price = price;
      row_[static_cast<std::size_t>(lvl)].bid_volume = volume;
    });
    books.push_row(row_);
  }

  ZiConfig cfg_;
  Rng rng_;
  BookSide<std::greater<Price>> bids_;
  BookSide<std::less<Price>> asks_;
  std::unordered_map<std::int64_t, OrderLoc> locs_;
  std::unordered_map<std::int64_t, std::size_t> pos_;
  std::vector<std::int64_t> live_;
  std::vector<QuoteLevel> row_;
  std::int64_t next_id_ = 1;
  ZiStats stats_;
};

}  // namespace

ZiResult generate_zero_intelligence(const ZiConfig& config) {
  return ZiSimulator(config).run();
}

std::vector<MarketOrder> generate_kyle_world(const KyleWorldConfig& config) {
  if (config.lambda_star < 0 || config.noise_stddev_cents < 0)
    throw std::invalid_argument("lambda and noise stddev must be >= 0");
  if (config.size_min < 1 || config.size_max < config.size_min)
    throw std::invalid_argument("bad size range");

  Rng rng(config.seed);
  std::vector<MarketOrder> orders;
  orders.reserve(config.n_mo);

  std::int64_t mid_twice = 2 * static_cast<std::int64_t>(config.initial_mid);
  constexpr TimeNs kStart = TimeNs{(10 * 3600 + 30 * 60)} * kNsPerSecond;
  constexpr TimeNs kSpacing = 1'000'000;  // 1 ms between orders

  for (std::size_t i = 0; i < config.n_mo; ++i) {
    int sign = rng.sign();
    auto size = static_cast<Shares>(rng.uniform_int(config.size_min, config.size_max));
    double dm_cents = config.lambda_star * sign * static_cast<double>(size) +
                      rng.normal(0.0, config.noise_stddev_cents);
    // Quantize to the half-unit grid (0.005 cents), exact for noiseless runs.
    std::int64_t dm_twice = std::llround(dm_cents * 200.0);

    MarketOrder mo;
    mo.time = kStart + static_cast<TimeNs>(i) * kSpacing;
    mo.sign = sign;
    mo.total_size = size;
    mo.n_fills = 1;
    mo.mid_before = MidPrice{mid_twice};
    mid_twice += dm_twice;
    mo.mid_after_next = MidPrice{mid_twice};
    mo.spread_before = config.spread;
    mo.opposite_best_volume_before = config.size_max;
    mo.price_changing = mo.total_size >= mo.opposite_best_volume_before;
    mo.last_of_day = i + 1 == config.n_mo;
    orders.push_back(mo);
  }
  return orders;
}

MergedStream kyle_world_to_stream(std::span<const MarketOrder> orders,
                                  const KyleWorldConfig& config, const std::string& ticker,
                                  const std::string& date) {
  MergedStream stream;
  stream.meta = StreamMeta{ticker, date, 1};
  stream.books = SnapshotSeries(1);
  std::int64_t next_id = 1;
  const std::int64_t s = config.spread;

  auto book_row = [&](std::int64_t mid_twice) {
    // Round the ask up so ask-bid stays exactly `spread` on the unit grid.
    std::int64_t ask = (mid_twice + s + 1) / 2;
    QuoteLevel q;
    q.ask_price = static_cast<Price>(ask);
    q.bid_price = static_cast<Price>(ask - s);
    q.ask_volume = std::max<Shares>(1, config.size_max);
    q.bid_volume = q.ask_volume;
    return q;
  };

  for (const MarketOrder& mo : orders) {
    QuoteLevel before = book_row(mo.mid_before.twice);
    // The print happens at the opposite best quote.
    Price price = mo.sign > 0 ? before.ask_price : before.bid_price;
    EventRecord e;
    e.time = mo.time;
    e.order_id = next_id++;
    e.price = price;
    e.size = static_cast<Shares>(mo.total_size);
    e.type = EventType::ExecVisible;
    e.direction = static_cast<std::int8_t>(-mo.sign);
    stream.events.push_back(e);
    QuoteLevel after = book_row(mo.mid_after_next.twice);
    stream.books.push_row(std::span<const QuoteLevel>(&after, 1));
  }
  return stream;
}

}  // namespace lobimpact
