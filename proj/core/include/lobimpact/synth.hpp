#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lobimpact/preprocess.hpp"
#include "lobimpact/types.hpp"

namespace lobimpact {

// Order flow as three independent fixed-rate Poisson streams (submissions,
// market orders, cancellations) hitting a price-time-priority book.
// Everything is one lot; limit orders land uniformly in a band of ticks
// behind the opposite best, so the book cannot cross.
struct ZiConfig {
  double lo_rate = 1.0;      // limit order submissions per second
  double mo_rate = 0.2;      // market orders per second
  double cancel_rate = 0.5;  // cancellations per second
  Price tick = 100;          // $0.01
  Shares lot = 100;
  Price initial_mid = 2'000'000;  // $200.00; best quotes start one tick away
  int depth = 1;                  // book depth carried in the output
  int band_ticks = 20;            // placement band behind the opposite best
  int seed_lots_per_level = 3;    // pre-seeded resting orders per band level
  SessionWindow session{TimeNs{(10 * 3600 + 30 * 60)} * kNsPerSecond,
                        TimeNs{(10 * 3600 + 31 * 60)} * kNsPerSecond};
  std::uint64_t seed = 1;
  std::string ticker = "ZISIM";
  std::string date = "2015-01-02";
};

struct ZiStats {
  std::int64_t submitted_volume = 0;  // includes the pre-seeded book
  std::int64_t executed_volume = 0;
  std::int64_t cancelled_volume = 0;
  std::int64_t resting_volume_end = 0;
  // Conservation: submitted == executed + cancelled + resting_end.
};

struct ZiResult {
  MergedStream stream;
  ZiStats stats;
};

// Deterministic for a given config+seed (all randomness flows through Rng).
// Throws SimulationHaltError when a book side runs dry or drops below the
// requested output depth.
ZiResult generate_zero_intelligence(const ZiConfig& config);

// Linear-impact world: each order moves the mid by lambda * sign * size plus
// Gaussian noise, so downstream estimators have an exact ground truth.
struct KyleWorldConfig {
  double lambda_star = 0.5;  // cents per share
  Shares size_min = 1;
  Shares size_max = 100;            // sizes uniform integers in [min, max]
  double noise_stddev_cents = 1.0;  // sigma of the additive mid noise
  std::size_t n_mo = 10'000;
  std::uint64_t seed = 1;
  Price initial_mid = 5'000'000;  // $500.00
  Price spread = 100;             // constant quoted spread
};

std::vector<MarketOrder> generate_kyle_world(const KyleWorldConfig& config);

// Embeds a market-order sequence into a one-level synthetic book (constant
// spread around the walking mid) so the sequence can ship as a LOBSTER pair.
MergedStream kyle_world_to_stream(std::span<const MarketOrder> orders, const KyleWorldConfig& config,
                                  const std::string& ticker = "KYLE",
                                  const std::string& date = "2015-01-02");

}  // namespace lobimpact
