#pragma once

// Shared fixtures: the sample LOBSTER message/orderbook pair from the format
// documentation, a multi-fill execution burst, and small builders used across
// test files.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "lobimpact/impact.hpp"
#include "lobimpact/ingest.hpp"
#include "lobimpact/rng.hpp"
#include "lobimpact/types.hpp"

namespace fixtures {

// Ten events around a two-fill sell MO (sizes 10 + 75 at 43955.2426) and a
// 300-share hidden execution.
inline constexpr const char* kSampleMessages =
    "43955.2422,4,140339446,5,2158800,1\n"
    "43955.2426,4,140339446,10,2158800,1\n"
    "43955.2426,4,140339446,75,2158800,1\n"
    "43955.2426,3,140339455,100,2159600,-1\n"
    "43955.2426,1,140339468,100,2159500,-1\n"
    "43955.2442,3,140339468,100,2159500,-1\n"
    "43955.2468,1,140339505,100,2158900,-1\n"
    "43955.2484,5,0,300,2158800,-1\n"
    "43955.2512,3,140339505,100,2158800,-1\n"
    "43955.2513,1,140339541,100,2159600,-1\n";

inline constexpr const char* kSampleBook =
    "2159600,100,2158800,85\n"
    "2159600,100,2158800,75\n"
    "2159600,100,2158300,20\n"
    "2160800,100,2158300,20\n"
    "2159500,100,2158300,20\n"
    "2160800,100,2158300,20\n"
    "2158900,100,2158300,20\n"
    "2158900,100,2158300,20\n"
    "2160800,100,2158300,20\n"
    "2159600,100,2158300,20\n";

// A single buy MO filled by three visible executions of 22 + 45 + 33 shares
// at one timestamp, which empties the best ask level.
inline constexpr const char* kBurstMessages =
    "37837.0474,1,70920403,100,2058500,-1\n"
    "37837.0474,4,70920403,22,2058500,-1\n"
    "37837.0474,4,70920403,45,2058500,-1\n"
    "37837.0474,4,70920403,33,2058500,-1\n"
    "37837.0479,3,70920380,100,2058000,1\n"
    "37837.0479,1,70920420,100,2058000,1\n";

inline constexpr const char* kBurstBook =
    "2058500,100,2058000,150\n"
    "2058500,78,2058000,150\n"
    "2058500,33,2058000,150\n"
    "2058800,69,2058000,150\n"
    "2058800,69,2058000,50\n"
    "2058800,69,2058000,150\n";

inline lobimpact::MergedStream parse_pair(const char* messages, const char* book,
                                          int depth = 1) {
  std::istringstream msg(messages);
  std::istringstream ob(book);
  auto events = lobimpact::parse_message_file(msg);
  auto books = lobimpact::parse_orderbook_file(ob, depth);
  return lobimpact::merge_streams(std::move(events), std::move(books),
                                  lobimpact::StreamMeta{"TEST", "2015-01-02", depth});
}

inline lobimpact::MergedStream sample_stream() {
  return parse_pair(kSampleMessages, kSampleBook);
}

inline lobimpact::MergedStream burst_stream() {
  return parse_pair(kBurstMessages, kBurstBook);
}

// Market order with mids given in dollar cents (exact on the half-unit grid).
inline lobimpact::MarketOrder make_mo(int sign, double mid_before_cents, double dm_cents,
                                      double spread_cents = 2.0,
                                      std::int64_t total_size = 100,
                                      std::int64_t opposite_volume = 1000) {
  lobimpact::MarketOrder mo;
  mo.sign = sign;
  mo.total_size = total_size;
  mo.n_fills = 1;
  mo.mid_before.twice = std::llround(mid_before_cents * 200.0);
  mo.mid_after_next.twice = mo.mid_before.twice + std::llround(dm_cents * 200.0);
  mo.spread_before = static_cast<lobimpact::Price>(std::llround(spread_cents * 100.0));
  mo.opposite_best_volume_before = opposite_volume;
  mo.price_changing = total_size >= opposite_volume;
  return mo;
}

// Random chained MO sequence: consecutive orders share mids
// (mid_after_next of t == mid_before of t+1), like reconstructed data.
inline std::vector<lobimpact::MarketOrder> random_orders(lobimpact::Rng& rng, std::size_t n) {
  std::vector<lobimpact::MarketOrder> orders;
  orders.reserve(n);
  std::int64_t mid_twice = 4'000'000;  // $200.00
  for (std::size_t i = 0; i < n; ++i) {
    lobimpact::MarketOrder mo;
    mo.time = static_cast<lobimpact::TimeNs>(40'000) * lobimpact::kNsPerSecond +
              static_cast<lobimpact::TimeNs>(i) * 1'000'000;
    mo.sign = rng.sign();
    mo.total_size = rng.uniform_int(1, 500);
    mo.n_fills = static_cast<int>(rng.uniform_int(1, 4));
    mo.mid_before.twice = mid_twice;
    mid_twice += rng.uniform_int(-400, 400);  // up to +/- 2 cents
    mo.mid_after_next.twice = mid_twice;
    mo.spread_before = static_cast<lobimpact::Price>(rng.uniform_int(100, 1000));
    mo.opposite_best_volume_before = rng.uniform_int(1, 1000);
    mo.price_changing = mo.total_size >= mo.opposite_best_volume_before;
    mo.last_of_day = i + 1 == n;
    orders.push_back(mo);
  }
  return orders;
}

}  // namespace fixtures
