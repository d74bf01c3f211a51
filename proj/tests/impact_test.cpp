#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "lobimpact/impact.hpp"

using namespace lobimpact;
using fixtures::make_mo;

TEST_CASE("mid price is the exact arithmetic mean of the best quotes") {
  QuoteLevel q{2159600, 100, 2158800, 85};
  CHECK(mid_price(q).twice == 2 * 2159200);
  CHECK(mid_price(q).units() == doctest::Approx(2159200.0));  // $215.92
  CHECK(mid_price(q).dollars() == doctest::Approx(215.92));

  // One-unit spread lands exactly on the half grid.
  QuoteLevel tight{101, 1, 100, 1};
  CHECK(mid_price(tight).twice == 201);
  CHECK(mid_price(tight).units() == doctest::Approx(100.5));

  // Translation equivariance.
  QuoteLevel shifted{q.ask_price + 700, q.ask_volume, q.bid_price + 700, q.bid_volume};
  CHECK(mid_price(shifted).twice == mid_price(q).twice + 2 * 700);
}

TEST_CASE("micro price weights each side by the opposite volume") {
  QuoteLevel balanced{100, 5, 90, 5};
  CHECK(micro_price(balanced) == doctest::Approx(mid_price(balanced).units()));

  QuoteLevel no_bid_volume{100, 7, 90, 0};  // weight on ask price vanishes
  CHECK(micro_price(no_bid_volume) == doctest::Approx(90.0));

  QuoteLevel skewed{100, 1, 90, 3};
  CHECK(micro_price(skewed) == doctest::Approx(97.5));
}

TEST_CASE("lag-1 response on single orders") {
  {
    auto stats = lag1_response(std::vector<MarketOrder>{make_mo(+1, 10000, +1.0)},
                               ResponseMode::Signed);
    REQUIRE(stats);
    CHECK(stats->r1_cents == doctest::Approx(1.0));
    auto clipped = lag1_response(std::vector<MarketOrder>{make_mo(+1, 10000, +1.0)},
                                 ResponseMode::Clipped);
    CHECK(clipped->r1_cents == doctest::Approx(1.0));
  }
  {
    auto signed_stats = lag1_response(std::vector<MarketOrder>{make_mo(+1, 10000, -1.0)},
                                      ResponseMode::Signed);
    CHECK(signed_stats->r1_cents == doctest::Approx(-1.0));
    auto clipped = lag1_response(std::vector<MarketOrder>{make_mo(+1, 10000, -1.0)},
                                 ResponseMode::Clipped);
    CHECK(clipped->r1_cents == doctest::Approx(0.0));
  }
}

TEST_CASE("lag-1 response three-order fixture, both modes") {
  std::vector<MarketOrder> orders{
      make_mo(+1, 10000, +2.0, 3.0),
      make_mo(-1, 10002, +1.0, 1.0),
      make_mo(+1, 10003, 0.0, 2.0),
  };
  auto s = lag1_response(orders, ResponseMode::Signed);
  REQUIRE(s);
  CHECK(s->n_mo == 3);
  CHECK(s->r1_cents == doctest::Approx((2.0 - 1.0 + 0.0) / 3.0));
  CHECK(s->avg_spread_cents == doctest::Approx(2.0));

  auto c = lag1_response(orders, ResponseMode::Clipped);
  CHECK(c->r1_cents == doctest::Approx((2.0 + 0.0 + 0.0) / 3.0));

  // V(1) = (4 + 1 + 0)/3 in both modes; sigma = sqrt(V(1) - R(1)^2).
  double v1 = 5.0 / 3.0;
  CHECK(s->sigma_r_cents == doctest::Approx(std::sqrt(v1 - s->r1_cents * s->r1_cents)));
  CHECK(c->sigma_r_cents == doctest::Approx(std::sqrt(v1 - c->r1_cents * c->r1_cents)));
}

TEST_CASE("lag-1 response: empty day signals, never crashes") {
  CHECK_FALSE(lag1_response({}, ResponseMode::Signed).has_value());
}

TEST_CASE("clipped R(1) dominates signed R(1); translation and sign-flip laws") {
  Rng rng(21);
  for (int round = 0; round < 30; ++round) {
    auto orders = fixtures::random_orders(rng, 1 + static_cast<std::size_t>(rng.below(100)));
    auto s = lag1_response(orders, ResponseMode::Signed);
    auto c = lag1_response(orders, ResponseMode::Clipped);
    CHECK(c->r1_cents >= s->r1_cents - 1e-12);

    auto shifted = orders;
    for (auto& mo : shifted) {
      mo.mid_before.twice += 123456;
      mo.mid_after_next.twice += 123456;
    }
    auto s2 = lag1_response(shifted, ResponseMode::Signed);
    CHECK(s2->r1_cents == doctest::Approx(s->r1_cents).epsilon(1e-12));

    auto flipped = orders;
    for (auto& mo : flipped) mo.sign = -mo.sign;
    auto s3 = lag1_response(flipped, ResponseMode::Signed);
    CHECK(s3->r1_cents == doctest::Approx(-s->r1_cents).epsilon(1e-12));
  }
}

TEST_CASE("count-weighted combine matches whole-day statistics") {
  Rng rng(5);
  for (int round = 0; round < 20; ++round) {
    auto orders = fixtures::random_orders(rng, 2 + static_cast<std::size_t>(rng.below(200)));
    std::size_t cut = 1 + static_cast<std::size_t>(rng.below(orders.size() - 1));
    std::span<const MarketOrder> all = orders;
    for (ResponseMode mode : {ResponseMode::Signed, ResponseMode::Clipped}) {
      auto whole = lag1_response(all, mode);
      auto merged = combine(*lag1_response(all.subspan(0, cut), mode),
                            *lag1_response(all.subspan(cut), mode));
      CHECK(merged.n_mo == whole->n_mo);
      CHECK(merged.avg_spread_cents == doctest::Approx(whole->avg_spread_cents).epsilon(1e-12));
      CHECK(merged.r1_cents == doctest::Approx(whole->r1_cents).epsilon(1e-12));
      CHECK(merged.sigma_r_cents == doctest::Approx(whole->sigma_r_cents).epsilon(1e-10));
    }
  }
}

TEST_CASE("diffusion: constant mid, alternating mid, lag zero") {
  std::vector<MarketOrder> constant;
  for (int i = 0; i < 10; ++i) constant.push_back(make_mo(+1, 10000, 0.0));
  for (std::size_t l = 0; l < 5; ++l) CHECK(diffusion(constant, l) == doctest::Approx(0.0));

  // Mid alternates +1/-1 cents between consecutive orders.
  std::vector<MarketOrder> alternating;
  for (int i = 0; i < 8; ++i)
    alternating.push_back(make_mo(+1, i % 2 == 0 ? 10000 : 10001, 0.0));
  CHECK(diffusion(alternating, 1) == doctest::Approx(1.0));
  CHECK(diffusion(alternating, 2) == doctest::Approx(0.0));
  CHECK(diffusion(alternating, 0) == doctest::Approx(0.0));

  CHECK_THROWS_AS(diffusion(alternating, 8), std::invalid_argument);
  for (std::size_t l = 0; l < 8; ++l) CHECK(diffusion(alternating, l) >= 0.0);
}

TEST_CASE("order-flow imbalance windows") {
  SUBCASE("two-order window") {
    std::vector<MarketOrder> orders{make_mo(+1, 10000, 0.0, 2, 100),
                                    make_mo(-1, 10000, +10.0, 2, 40)};
    // Chain the mids: second order's move carries the window from 100.00 to 100.10.
    orders[0].mid_after_next = orders[1].mid_before = orders[0].mid_before;
    orders[1].mid_after_next.twice = orders[1].mid_before.twice + 10 * 200;
    auto samples = order_flow_imbalance(orders, 2);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].delta_v == 100 - 40);
    CHECK(samples[0].delta_m_cents == doctest::Approx(10.0));
  }

  SUBCASE("uniform sells have coherent sign") {
    std::vector<MarketOrder> orders;
    for (int i = 0; i < 5; ++i) orders.push_back(make_mo(-1, 10000, 0.0, 2, 70));
    auto samples = order_flow_imbalance(orders, 5);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].delta_v == -5 * 70);
  }

  SUBCASE("brute force equality and window counts") {
    Rng rng(13);
    for (int round = 0; round < 40; ++round) {
      auto orders = fixtures::random_orders(rng, 100);
      std::size_t window = 1 + static_cast<std::size_t>(rng.below(20));
      auto samples = order_flow_imbalance(orders, window);
      CHECK(samples.size() == orders.size() / window);
      for (const auto& s : samples) {
        std::int64_t dv = 0;
        for (std::size_t n = s.t_start; n < s.t_start + window; ++n)
          dv += orders[n].sign * orders[n].total_size;
        CHECK(s.delta_v == dv);
        double dm = cents_between(orders[s.t_start].mid_before,
                                  orders[s.t_start + window - 1].mid_after_next);
        CHECK(s.delta_m_cents == doctest::Approx(dm));
      }
    }
  }

  SUBCASE("imbalance is additive across adjacent windows") {
    Rng rng(17);
    auto orders = fixtures::random_orders(rng, 120);
    std::size_t window = 10;
    auto fine = order_flow_imbalance(orders, window, window);
    auto coarse = order_flow_imbalance(orders, 2 * window, 2 * window);
    for (std::size_t i = 0; i < coarse.size(); ++i)
      CHECK(coarse[i].delta_v == fine[2 * i].delta_v + fine[2 * i + 1].delta_v);
  }

  SUBCASE("fewer orders than the window yields nothing") {
    auto orders = std::vector<MarketOrder>{make_mo(+1, 10000, 0.0)};
    CHECK(order_flow_imbalance(orders, 5).empty());
  }

  SUBCASE("stride below window overlaps") {
    Rng rng(19);
    auto orders = fixtures::random_orders(rng, 30);
    auto samples = order_flow_imbalance(orders, 10, 1);
    CHECK(samples.size() == 21);
  }
}

TEST_CASE("volume-conditioned curve bins split at 0.1") {
  SUBCASE("one fine bin") {
    std::vector<NormalizedMo> orders;
    for (int i = 0; i < 12; ++i)
      orders.push_back(NormalizedMo{make_mo(+1, 10000, +2.0), 0.05});
    auto curve = volume_conditioned_response(orders, ResponseMode::Signed);
    REQUIRE(curve.bins.size() == 1);
    CHECK(curve.bins[0].center == doctest::Approx(0.055));
    CHECK(curve.bins[0].mean_response == doctest::Approx(2.0));
    CHECK(curve.bins[0].count == 12);
  }

  SUBCASE("fine and coarse regimes") {
    std::vector<NormalizedMo> orders{NormalizedMo{make_mo(+1, 10000, +1.0), 0.05},
                                     NormalizedMo{make_mo(+1, 10000, +3.0), 0.15}};
    auto curve = volume_conditioned_response(orders, ResponseMode::Signed);
    REQUIRE(curve.bins.size() == 2);
    CHECK(curve.bins[0].center == doctest::Approx(0.055));
    CHECK(curve.bins[1].center == doctest::Approx(0.15));
  }

  SUBCASE("square-root cloud comes back concave and increasing") {
    std::vector<NormalizedMo> orders;
    for (int i = 1; i <= 999; ++i) {
      double v = static_cast<double>(i) / 1000.0;
      orders.push_back(NormalizedMo{make_mo(+1, 10000, 10.0 * std::sqrt(v)), v});
    }
    auto curve = volume_conditioned_response(orders, ResponseMode::Signed);
    CHECK(curve.total_count() == orders.size());
    REQUIRE(curve.bins.size() > 5);
    double prev_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < curve.bins.size(); ++i) {
      double rise = curve.bins[i].mean_response - curve.bins[i - 1].mean_response;
      CHECK(rise > 0.0);  // monotone increasing
      double slope = rise / (curve.bins[i].mean_x - curve.bins[i - 1].mean_x);
      CHECK(slope <= prev_slope + 1e-9);  // concave
      prev_slope = slope;
    }
  }
}

TEST_CASE("aggregate impact curve") {
  SUBCASE("exact line stays a line") {
    std::vector<ImbalanceSample> samples;
    for (int dv = -100; dv <= 100; ++dv)
      samples.push_back(ImbalanceSample{dv, 0.01 * dv, 0});
    auto curve = aggregate_impact_curve(samples, 25.0);
    CHECK(curve.total_count() == samples.size());
    for (const auto& bin : curve.bins)
      CHECK(bin.mean_response == doctest::Approx(0.01 * bin.mean_x).epsilon(1e-12));
  }

  SUBCASE("single bin collapses to the sample means") {
    std::vector<ImbalanceSample> samples{{10, 1.0, 0}, {20, 3.0, 1}};
    auto curve = aggregate_impact_curve(samples, 1000.0);
    REQUIRE(curve.bins.size() == 1);
    CHECK(curve.bins[0].mean_x == doctest::Approx(15.0));
    CHECK(curve.bins[0].mean_response == doctest::Approx(2.0));
    CHECK(curve.bins[0].count == 2);
  }

  CHECK_THROWS_AS(aggregate_impact_curve({}, 0.0), std::invalid_argument);
}

TEST_CASE("imbalance outlier filter drops extremes on either coordinate") {
  std::vector<ImbalanceSample> samples;
  Rng rng(29);
  for (int i = 0; i < 300; ++i)
    samples.push_back(ImbalanceSample{rng.uniform_int(-100, 100), rng.normal(0, 1),
                                      static_cast<std::size_t>(i)});
  samples.push_back(ImbalanceSample{50, 1e6, 300});     // wild response
  samples.push_back(ImbalanceSample{2'000'000, 0.0, 301});  // wild imbalance
  auto kept = filter_imbalance_outliers(samples, 3.0);
  CHECK(kept.size() <= samples.size() - 2);
  for (const auto& s : kept) {
    CHECK(std::abs(s.delta_m_cents) < 1e5);
    CHECK(std::abs(s.delta_v) < 1'000'000);
  }
}
