#include <benchmark/benchmark.h>

#include <sstream>

#include "lobimpact/bars.hpp"
#include "lobimpact/impact.hpp"
#include "lobimpact/ingest.hpp"
#include "lobimpact/preprocess.hpp"
#include "lobimpact/regress.hpp"
#include "lobimpact/rng.hpp"
#include "lobimpact/synth.hpp"

using namespace lobimpact;

namespace {

// One seeded synthetic day, reused across benchmarks.
const ZiResult& day() {
  static ZiResult result = [] {
    ZiConfig cfg;
    cfg.seed = 1;
    cfg.lo_rate = 38.0;
    cfg.mo_rate = 7.0;
    cfg.cancel_rate = 17.0;
    cfg.session = SessionWindow{TimeNs{37'800} * kNsPerSecond, TimeNs{41'400} * kNsPerSecond};
    return generate_zero_intelligence(cfg);
  }();
  return result;
}

std::pair<std::string, std::string> day_files() {
  std::ostringstream msg;
  std::ostringstream book;
  emit_lobster_files(day().stream, msg, book);
  return {msg.str(), book.str()};
}

void BM_ParseMessageFile(benchmark::State& state) {
  auto [msg, book] = day_files();
  for (auto _ : state) {
    std::istringstream in(msg);
    auto events = parse_message_file(in);
    benchmark::DoNotOptimize(events.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * msg.size()));
}
BENCHMARK(BM_ParseMessageFile);

void BM_ParseOrderbookFile(benchmark::State& state) {
  auto [msg, book] = day_files();
  for (auto _ : state) {
    std::istringstream in(book);
    auto books = parse_orderbook_file(in, 1);
    benchmark::DoNotOptimize(&books);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * book.size()));
}
BENCHMARK(BM_ParseOrderbookFile);

void BM_ReconstructMarketOrders(benchmark::State& state) {
  const MergedStream& stream = day().stream;
  for (auto _ : state) {
    auto orders = reconstruct_market_orders(stream);
    benchmark::DoNotOptimize(orders.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.size()));
}
BENCHMARK(BM_ReconstructMarketOrders);

void BM_Lag1Response(benchmark::State& state) {
  auto orders = reconstruct_market_orders(day().stream);
  for (auto _ : state) {
    auto stats = lag1_response(orders, ResponseMode::Signed);
    benchmark::DoNotOptimize(&stats);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * orders.size()));
}
BENCHMARK(BM_Lag1Response);

void BM_VolumeBars(benchmark::State& state) {
  auto trades = trades_from_stream(day().stream);
  for (auto _ : state) {
    auto bars = sample_bars(trades, BarSpec{BarKind::Volume, 1000});
    benchmark::DoNotOptimize(bars.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * trades.size()));
}
BENCHMARK(BM_VolumeBars);

void BM_OlsFit(benchmark::State& state) {
  Rng rng(9);
  std::vector<double> x;
  std::vector<double> y;
  for (int i = 0; i < 10'000; ++i) {
    x.push_back(rng.normal(0, 1));
    y.push_back(0.3 + 0.011 * x.back() + rng.normal(0, 0.5));
  }
  for (auto _ : state) {
    LinearModel m = ols_fit(x, y);
    benchmark::DoNotOptimize(&m);
  }
}
BENCHMARK(BM_OlsFit);

void BM_TreeFit(benchmark::State& state) {
  Rng rng(10);
  std::vector<double> x;
  std::vector<double> y;
  for (int i = 0; i < 10'000; ++i) {
    x.push_back(rng.normal(0, 1));
    y.push_back(x.back() > 0 ? 1.0 + rng.normal(0, 0.2) : -1.0 + rng.normal(0, 0.2));
  }
  for (auto _ : state) {
    RegressionTree t = tree_fit(x, y, 8, 5);
    benchmark::DoNotOptimize(&t);
  }
}
BENCHMARK(BM_TreeFit);

void BM_ZeroIntelligenceSim(benchmark::State& state) {
  ZiConfig cfg;
  cfg.seed = 3;
  cfg.lo_rate = 38.0;
  cfg.mo_rate = 7.0;
  cfg.cancel_rate = 17.0;
  for (auto _ : state) {
    ZiResult result = generate_zero_intelligence(cfg);
    benchmark::DoNotOptimize(&result);
  }
}
BENCHMARK(BM_ZeroIntelligenceSim);

}  // namespace

BENCHMARK_MAIN();
