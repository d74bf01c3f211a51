// lobimpact: LOBSTER ingestion, market-order impact estimation and model
// fitting from the command line. Subcommands chain into the full pipeline:
//   ingest -> impact/imbalance/bars -> fit/cv, or `reproduce` for all of it.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "artifacts.hpp"
#include "lobimpact/bars.hpp"
#include "lobimpact/impact.hpp"
#include "lobimpact/ingest.hpp"
#include "lobimpact/preprocess.hpp"
#include "lobimpact/regress.hpp"
#include "lobimpact/rng.hpp"
#include "lobimpact/synth.hpp"

using namespace lobimpact;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string input;
  std::string message;
  std::string orderbook;
  std::string ticker;
  std::string date;
  std::string out = "out";
  std::string session_start = "10:30";
  std::string session_end = "15:00";
  int depth = 1;
  int jobs = 1;
};

void add_input_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--input", o.input,
                  "Directory or glob of <ticker>_<date>_message.csv[.gz] day pairs")
      ->envname("LOBIMPACT_INPUT");
  cmd->add_option("--message", o.message, "Single message file ('-' reads stdin)");
  cmd->add_option("--orderbook", o.orderbook, "Orderbook file paired with --message");
  cmd->add_option("--ticker", o.ticker, "Ticker label for an explicit pair");
  cmd->add_option("--date", o.date, "Date label for an explicit pair");
  cmd->add_option("--depth", o.depth, "Book levels per orderbook row")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")
      ->capture_default_str()
      ->envname("LOBIMPACT_OUT");
  cmd->add_option("--jobs", o.jobs, "Parallel day workers")
      ->capture_default_str()
      ->envname("LOBIMPACT_JOBS");
}

void add_session_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--session-start", o.session_start, "Session clip start (HH:MM)")
      ->capture_default_str()
      ->envname("LOBIMPACT_SESSION_START");
  cmd->add_option("--session-end", o.session_end, "Session clip end (HH:MM)")
      ->capture_default_str()
      ->envname("LOBIMPACT_SESSION_END");
}

SessionWindow window_of(const CommonOpts& o) {
  return SessionWindow{parse_hhmm(o.session_start), parse_hhmm(o.session_end)};
}

// Echo of the active subcommand's configuration. The output directory and
// worker count do not affect results, so they stay out of the manifest and
// reruns into a different --out remain byte-identical.
std::string config_echo(const CLI::App& sub) {
  std::istringstream in(sub.config_to_str(true, false));
  std::string line;
  std::string out = sub.get_name();
  out += ": ";
  while (std::getline(in, line)) {
    if (line.rfind("out=", 0) == 0 || line.rfind("jobs=", 0) == 0 ||
        line.rfind("config=", 0) == 0)
      continue;
    out += line;
    out += "; ";
  }
  return out;
}

json make_manifest(const CLI::App& sub, const std::vector<lobcli::DayFiles>& days) {
  json manifest;
  manifest["version"] = lobcli::kVersion;
  manifest["config"] = config_echo(sub);
  json inputs = json::object();
  for (const auto& day : days) {
    for (const std::string& path : {day.message, day.orderbook}) {
      if (path == "-") {
        inputs["-"] = "stdin";
      } else {
        inputs[path] = lobcli::hex64(lobcli::fnv1a64_file(path));
      }
    }
  }
  manifest["inputs"] = inputs;
  return manifest;
}

MergedStream load_stream(const lobcli::DayFiles& day, int depth) {
  auto events = read_message_file(day.message);
  auto books = read_orderbook_file(day.orderbook, depth);
  return merge_streams(std::move(events), std::move(books),
                       StreamMeta{day.ticker, day.date, depth});
}

ResponseMode mode_of(const std::string& name) {
  if (name == "signed") return ResponseMode::Signed;
  if (name == "clipped") return ResponseMode::Clipped;
  throw std::runtime_error("unknown response mode '" + name + "'");
}

json evaluation_json(const Evaluation& ev) {
  json out;
  out["mse"] = ev.mse;
  if (ev.r2) out["r2"] = *ev.r2;
  if (ev.adjusted_r2) out["adjusted_r2"] = *ev.adjusted_r2;
  out["aic"] = std::isfinite(ev.aic) ? json(ev.aic) : json("-inf");
  out["bic"] = std::isfinite(ev.bic) ? json(ev.bic) : json("-inf");
  return out;
}

json linear_model_json(const LinearModel& m) {
  json out;
  out["intercept"] = m.intercept();
  out["slope"] = m.slope();
  out["n"] = m.n;
  auto t = t_statistics(m);
  json tj = json::array();
  for (double v : t) tj.push_back(std::isfinite(v) ? json(v) : json(v > 0 ? "inf" : "-inf"));
  out["t_statistics"] = tj;
  return out;
}

double correlation(std::span<const ImbalanceSample> samples) {
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  auto n = static_cast<double>(samples.size());
  for (const auto& s : samples) {
    double x = static_cast<double>(s.delta_v);
    double y = s.delta_m_cents;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  double den = (n * sxx - sx * sx) * (n * syy - sy * sy);
  return den > 0 ? (n * sxy - sx * sy) / std::sqrt(den) : 0.0;
}

// ---------------------------------------------------------------------------
// Sample-file input for fit/cv: header-based CSV, '#' lines ignored.
// ---------------------------------------------------------------------------

std::pair<std::vector<double>, std::vector<double>> read_xy(const std::string& path,
                                                            const std::string& xcol,
                                                            const std::string& ycol) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
    break;
  }
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("column '" + name + "' not found in " + path);
  };
  std::size_t xi = column(xcol);
  std::size_t yi = column(ycol);

  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() <= std::max(xi, yi))
      throw std::runtime_error(path + ": short row at line " + std::to_string(lineno));
    try {
      xs.push_back(std::stod(cells[xi]));
      ys.push_back(std::stod(cells[yi]));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": bad number at line " + std::to_string(lineno));
    }
  }
  return {std::move(xs), std::move(ys)};
}

// Seeded holdout split; returns indices of the test set.
std::vector<bool> test_mask(std::size_t n, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);
  auto n_test = static_cast<std::size_t>(fraction * static_cast<double>(n));
  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < n_test; ++i) mask[order[i]] = true;
  return mask;
}

// ---------------------------------------------------------------------------
// Per-day pipeline shared by impact/imbalance/bars/reproduce
// ---------------------------------------------------------------------------

struct DayResult {
  lobcli::DayFiles files;
  std::vector<MarketOrder> orders;
  std::optional<ResponseStats> stats;
  std::vector<ImbalanceSample> samples;
};

std::vector<DayResult> run_days(const std::vector<lobcli::DayFiles>& days, const CommonOpts& o,
                                ResponseMode mode, std::size_t window, std::size_t stride,
                                bool want_samples) {
  std::vector<DayResult> results(days.size());
  SessionWindow session = window_of(o);
  lobcli::parallel_for(days.size(), o.jobs, [&](std::size_t i) {
    DayResult& r = results[i];
    r.files = days[i];
    MergedStream clipped = clip_session(load_stream(days[i], o.depth), session);
    r.orders = reconstruct_market_orders(clipped);
    r.stats = lag1_response(r.orders, mode);
    if (want_samples && !r.orders.empty())
      r.samples = order_flow_imbalance(r.orders, window, stride == 0 ? window : stride);
  });
  return results;
}

std::vector<std::string> impact_rows(const std::vector<DayResult>& results) {
  std::vector<std::string> rows;
  for (const DayResult& r : results) {
    if (!r.stats) continue;
    rows.push_back(r.files.ticker + "," + r.files.date + "," + lobcli::fmt(r.stats->avg_spread_cents) +
                   "," + lobcli::fmt(r.stats->r1_cents) + "," + lobcli::fmt(r.stats->sigma_r_cents) +
                   "," + std::to_string(r.stats->n_mo));
  }
  return rows;
}

// Unweighted mean of daily statistics per ticker (period summary).
json ticker_summaries(const std::vector<DayResult>& results) {
  std::map<std::string, std::vector<const ResponseStats*>> by_ticker;
  for (const DayResult& r : results)
    if (r.stats) by_ticker[r.files.ticker].push_back(&*r.stats);
  json out = json::object();
  for (const auto& [ticker, stats] : by_ticker) {
    double spread = 0, r1 = 0, sigma = 0, n_mo = 0;
    for (const ResponseStats* s : stats) {
      spread += s->avg_spread_cents;
      r1 += s->r1_cents;
      sigma += s->sigma_r_cents;
      n_mo += static_cast<double>(s->n_mo);
    }
    auto n = static_cast<double>(stats.size());
    out[ticker] = json{{"days", stats.size()},
                       {"avg_spread", spread / n},
                       {"r1", r1 / n},
                       {"sigma_r", sigma / n},
                       {"n_mo_per_day", n_mo / n}};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_ingest(const CLI::App& cmd, const CommonOpts& o, int time_digits) {
  auto days = lobcli::discover_days(o.input, o.message, o.orderbook, o.ticker, o.date);
  json manifest = make_manifest(cmd, days);
  lobcli::RunDir run(o.out);

  std::vector<std::vector<std::string>> per_day(days.size());
  std::mutex claim_mutex;
  lobcli::parallel_for(days.size(), o.jobs, [&](std::size_t i) {
    MergedStream stream = load_stream(days[i], o.depth);
    for (const Violation& v : validate_stream(stream))
      per_day[i].push_back(days[i].ticker + "," + days[i].date + "," + std::to_string(v.index) +
                           "," + v.kind + "," + v.message);
    std::string base = days[i].ticker + "_" + days[i].date;
    std::filesystem::path msg_path;
    std::filesystem::path book_path;
    {
      std::lock_guard<std::mutex> lock(claim_mutex);
      msg_path = run.claim(base + "_message.csv");
      book_path = run.claim(base + "_orderbook.csv");
    }
    std::ofstream msg(msg_path, std::ios::binary);
    std::ofstream book(book_path, std::ios::binary);
    emit_lobster_files(stream, msg, book, time_digits);
    if (!msg || !book) throw std::runtime_error("failed writing " + base);
  });

  std::vector<std::string> violation_rows;
  for (auto& rows : per_day)
    violation_rows.insert(violation_rows.end(), rows.begin(), rows.end());
  lobcli::write_csv(run, "validation.csv", manifest, "ticker,date,index,kind,message",
                    violation_rows);
  run.keep();
  std::cout << "ingested " << days.size() << " day(s); " << violation_rows.size()
            << " violation(s)\n";
  return 0;
}

int cmd_impact(const CLI::App& cmd, const CommonOpts& o, const std::string& mode_name) {
  auto days = lobcli::discover_days(o.input, o.message, o.orderbook, o.ticker, o.date);
  json manifest = make_manifest(cmd, days);
  auto results = run_days(days, o, mode_of(mode_name), 1, 1, false);

  lobcli::RunDir run(o.out);
  lobcli::write_csv(run, "impact.csv", manifest, "ticker,date,avg_spread,r1,sigma_r,n_mo",
                    impact_rows(results));
  json summary;
  summary["mode"] = mode_name;
  summary["tickers"] = ticker_summaries(results);
  std::size_t skipped = 0;
  for (const auto& r : results) skipped += r.stats ? 0 : 1;
  summary["days_without_orders"] = skipped;
  lobcli::write_json(run, "summary.json", manifest, std::move(summary));
  run.keep();
  return 0;
}

int cmd_imbalance(const CLI::App& cmd, const CommonOpts& o, const std::string& mode_name,
                  std::size_t window, std::size_t stride, double outlier_k, double bin_width) {
  auto days = lobcli::discover_days(o.input, o.message, o.orderbook, o.ticker, o.date);
  json manifest = make_manifest(cmd, days);
  auto results = run_days(days, o, mode_of(mode_name), window, stride, true);

  std::vector<std::string> sample_rows;
  std::vector<ImbalanceSample> pooled;
  for (const DayResult& r : results) {
    for (const ImbalanceSample& s : r.samples) {
      sample_rows.push_back(r.files.ticker + "," + r.files.date + "," +
                            std::to_string(s.t_start) + "," + std::to_string(s.delta_v) + "," +
                            lobcli::fmt(s.delta_m_cents));
      pooled.push_back(s);
    }
  }
  auto kept = filter_imbalance_outliers(pooled, outlier_k);

  double width = bin_width;
  if (width <= 0 && !kept.empty()) {
    std::int64_t lo = kept.front().delta_v;
    std::int64_t hi = lo;
    for (const auto& s : kept) {
      lo = std::min(lo, s.delta_v);
      hi = std::max(hi, s.delta_v);
    }
    width = std::max<double>(1.0, std::ceil(static_cast<double>(hi - lo) / 40.0));
  }

  lobcli::RunDir run(o.out);
  lobcli::write_csv(run, "samples.csv", manifest, "ticker,date,t_start,delta_v,delta_m_cents",
                    sample_rows);
  std::vector<std::string> curve_rows;
  if (!kept.empty()) {
    ConditionedCurve curve = aggregate_impact_curve(kept, width);
    for (const CurveBin& b : curve.bins)
      curve_rows.push_back(lobcli::fmt(b.center) + "," + lobcli::fmt(b.mean_x) + "," +
                           lobcli::fmt(b.mean_response) + "," + std::to_string(b.count));
  }
  lobcli::write_csv(run, "curve.csv", manifest, "center,mean_delta_v,mean_delta_m_cents,count",
                    curve_rows);
  json summary;
  summary["window"] = window;
  summary["stride"] = stride == 0 ? window : stride;
  summary["n_samples"] = pooled.size();
  summary["n_kept"] = kept.size();
  summary["bin_width"] = width;
  summary["correlation"] = correlation(kept);
  lobcli::write_json(run, "imbalance.json", manifest, std::move(summary));
  run.keep();
  return 0;
}

int cmd_bars(const CLI::App& cmd, const CommonOpts& o, const std::string& kind_name,
             std::int64_t threshold) {
  auto days = lobcli::discover_days(o.input, o.message, o.orderbook, o.ticker, o.date);
  json manifest = make_manifest(cmd, days);
  BarSpec spec{bar_kind_from_string(kind_name), threshold};
  SessionWindow session = window_of(o);

  std::vector<std::vector<std::string>> per_day(days.size());
  lobcli::parallel_for(days.size(), o.jobs, [&](std::size_t i) {
    MergedStream clipped = clip_session(load_stream(days[i], o.depth), session);
    auto bars = sample_bars(trades_from_stream(clipped), spec);
    for (const Bar& b : bars) {
      per_day[i].push_back(days[i].ticker + "," + days[i].date + "," +
                           std::to_string(b.start_time) + "," + std::to_string(b.end_time) + "," +
                           lobcli::fmt(b.open.units()) + "," + lobcli::fmt(b.high.units()) + "," +
                           lobcli::fmt(b.low.units()) + "," + lobcli::fmt(b.close.units()) + "," +
                           std::to_string(b.traded_volume) + "," + std::to_string(b.traded_dollar) +
                           "," + std::to_string(b.n_events) + "," + lobcli::fmt(b.vwap_units()) +
                           "," + (b.partial ? "1" : "0"));
    }
  });

  std::vector<std::string> rows;
  for (auto& day_rows : per_day) rows.insert(rows.end(), day_rows.begin(), day_rows.end());
  lobcli::RunDir run(o.out);
  lobcli::write_csv(run, "bars.csv", manifest,
                    "ticker,date,start_ns,end_ns,open,high,low,close,volume,dollar,n_events,vwap,partial",
                    rows);
  run.keep();
  return 0;
}

struct FitOpts {
  std::string input;
  std::string out = "out";
  std::string model = "ols";
  std::string xcol = "delta_v";
  std::string ycol = "delta_m_cents";
  double test_fraction = 0.25;
  std::uint64_t seed = 1;
  int max_depth = 8;
  int min_samples_leaf = 5;
  double quantile = 0.5;
  double abs_cutoff = 0.0;
};

json fit_supervised(const std::vector<double>& x, const std::vector<double>& y,
                    const FitOpts& fo) {
  auto mask = test_mask(x.size(), fo.test_fraction, fo.seed);
  std::vector<double> train_x, train_y, test_x, test_y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    (mask[i] ? test_x : train_x).push_back(x[i]);
    (mask[i] ? test_y : train_y).push_back(y[i]);
  }
  json out;
  out["n_train"] = train_x.size();
  out["n_test"] = test_x.size();
  if (fo.model == "ols") {
    LinearModel m = ols_fit(train_x, train_y);
    out["model"] = linear_model_json(m);
    out["train"] = evaluation_json(evaluate(m, train_x, train_y));
    if (!test_x.empty()) out["test"] = evaluation_json(evaluate(m, test_x, test_y));
  } else {
    RegressionTree t = tree_fit(train_x, train_y, fo.max_depth, fo.min_samples_leaf);
    out["model"] = json{{"max_depth", fo.max_depth},
                        {"min_samples_leaf", fo.min_samples_leaf},
                        {"leaves", t.leaf_count()}};
    auto eval_on = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
      std::vector<double> pred(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) pred[i] = t.predict(xs[i]);
      return evaluation_json(evaluate_predictions(pred, ys, t.leaf_count()));
    };
    out["train"] = eval_on(train_x, train_y);
    if (!test_x.empty()) out["test"] = eval_on(test_x, test_y);
  }
  return out;
}

int cmd_fit(const CLI::App& cmd, const FitOpts& fo) {
  auto [x, y] = read_xy(fo.input, fo.xcol, fo.ycol);
  if (x.empty()) throw lobcli::NoInputError("no samples in " + fo.input);
  json manifest;
  manifest["version"] = lobcli::kVersion;
  manifest["config"] = config_echo(cmd);
  manifest["inputs"] = json{{fo.input, lobcli::hex64(lobcli::fnv1a64_file(fo.input))}};

  json report;
  report["model_kind"] = fo.model;
  if (fo.model == "ols" || fo.model == "tree") {
    report.update(fit_supervised(x, y, fo));
  } else if (fo.model == "kyle") {
    std::vector<ImbalanceSample> samples(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      samples[i] = ImbalanceSample{static_cast<std::int64_t>(std::llround(x[i])), y[i], i};
    KyleRegion region;
    region.quantile = fo.quantile;
    if (fo.abs_cutoff > 0) region.abs_cutoff = fo.abs_cutoff;
    KyleLambda fit = kyle_lambda(samples, region);
    report["lambda"] = fit.lambda;
    report["region"] = json{{"lo", fit.region_lo}, {"hi", fit.region_hi}};
    report["n_in_region"] = fit.n_in_region;
    report["model"] = linear_model_json(fit.model);
  } else if (fo.model == "powerlaw") {
    PowerLaw fit = power_law_fit(x, y);
    report["exponent"] = fit.exponent;
    report["prefactor"] = fit.prefactor;
    report["model"] = linear_model_json(fit.model);
  } else {
    throw std::runtime_error("unknown model '" + fo.model + "'");
  }

  lobcli::RunDir run(fo.out);
  lobcli::write_json(run, "fit.json", manifest, std::move(report));
  run.keep();
  return 0;
}

int cmd_cv(const CLI::App& cmd, const FitOpts& fo, int k) {
  auto [x, y] = read_xy(fo.input, fo.xcol, fo.ycol);
  if (x.empty()) throw lobcli::NoInputError("no samples in " + fo.input);
  json manifest;
  manifest["version"] = lobcli::kVersion;
  manifest["config"] = config_echo(cmd);
  manifest["inputs"] = json{{fo.input, lobcli::hex64(lobcli::fnv1a64_file(fo.input))}};

  CvScores scores = kfold_cv(x, y, k, model_kind_from_string(fo.model), fo.seed,
                             TreeParams{fo.max_depth, fo.min_samples_leaf});
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < scores.fold_mse.size(); ++i)
    rows.push_back(std::to_string(i) + "," + lobcli::fmt(scores.fold_mse[i]) + "," +
                   lobcli::fmt(scores.fold_r2[i]));

  lobcli::RunDir run(fo.out);
  lobcli::write_csv(run, "folds.csv", manifest, "fold,mse,r2", rows);
  json report;
  report["model_kind"] = fo.model;
  report["k"] = scores.k;
  report["seed"] = scores.seed;
  report["mse_mean"] = scores.mse_mean;
  report["mse_stddev"] = scores.mse_stddev;
  report["r2_mean"] = scores.r2_mean;
  report["r2_stddev"] = scores.r2_stddev;
  lobcli::write_json(run, "cv.json", manifest, std::move(report));
  run.keep();
  return 0;
}

struct SynthOpts {
  std::string model = "zi";
  std::string out = "out";
  std::uint64_t seed = 1;
  std::string ticker;
  std::string date = "2015-01-02";
  // zero intelligence
  ZiConfig zi;
  // kyle world
  KyleWorldConfig kyle;
  std::size_t n = 10'000;
};

int cmd_synth(const CLI::App& cmd, SynthOpts& so, const CommonOpts& o) {
  json manifest;
  manifest["version"] = lobcli::kVersion;
  manifest["config"] = config_echo(cmd);
  manifest["inputs"] = json::object();

  lobcli::RunDir run(so.out);
  json truth;
  MergedStream stream;
  if (so.model == "zi") {
    so.zi.seed = so.seed;
    so.zi.ticker = so.ticker.empty() ? "ZISIM" : so.ticker;
    so.zi.date = so.date;
    so.zi.session = SessionWindow{parse_hhmm(o.session_start), parse_hhmm(o.session_end)};
    ZiResult result = generate_zero_intelligence(so.zi);
    stream = std::move(result.stream);
    truth["model"] = "zi";
    truth["rates"] = json{{"lo", so.zi.lo_rate}, {"mo", so.zi.mo_rate}, {"cancel", so.zi.cancel_rate}};
    truth["stats"] = json{{"submitted", result.stats.submitted_volume},
                          {"executed", result.stats.executed_volume},
                          {"cancelled", result.stats.cancelled_volume},
                          {"resting_end", result.stats.resting_volume_end}};
  } else if (so.model == "kyle") {
    so.kyle.seed = so.seed;
    so.kyle.n_mo = so.n;
    auto orders = generate_kyle_world(so.kyle);
    stream = kyle_world_to_stream(orders, so.kyle, so.ticker.empty() ? "KYLE" : so.ticker, so.date);
    truth["model"] = "kyle";
    truth["lambda_star"] = so.kyle.lambda_star;
    truth["noise_stddev_cents"] = so.kyle.noise_stddev_cents;
    truth["n_mo"] = so.kyle.n_mo;
  } else {
    throw std::runtime_error("unknown synth model '" + so.model + "'");
  }

  std::string base = stream.meta.ticker + "_" + stream.meta.date;
  {
    std::ofstream msg(run.claim(base + "_message.csv"), std::ios::binary);
    std::ofstream book(run.claim(base + "_orderbook.csv"), std::ios::binary);
    emit_lobster_files(stream, msg, book, 9);
    if (!msg || !book) throw std::runtime_error("failed writing synthetic day");
  }
  truth["seed"] = so.seed;
  truth["events"] = stream.size();
  lobcli::write_json(run, "truth.json", manifest, std::move(truth));
  run.keep();
  std::cout << "wrote " << base << "_message.csv / _orderbook.csv (" << stream.size()
            << " events)\n";
  return 0;
}

int cmd_reproduce(const CLI::App& cmd, const CommonOpts& o, const FitOpts& fo,
                  const std::string& mode_name, std::size_t window, double outlier_k, int k) {
  auto days = lobcli::discover_days(o.input, o.message, o.orderbook, o.ticker, o.date);
  json manifest = make_manifest(cmd, days);
  auto results = run_days(days, o, mode_of(mode_name), window, 0, true);

  lobcli::RunDir run(o.out);
  lobcli::write_csv(run, "impact.csv", manifest, "ticker,date,avg_spread,r1,sigma_r,n_mo",
                    impact_rows(results));

  // Table-shaped period summary, one row per ticker.
  json tickers = ticker_summaries(results);
  std::vector<std::string> summary_rows;
  for (const auto& [ticker, s] : tickers.items()) {
    summary_rows.push_back(ticker + "," + lobcli::fmt(s["avg_spread"].get<double>()) + "," +
                           lobcli::fmt(s["r1"].get<double>()) + "," +
                           lobcli::fmt(s["sigma_r"].get<double>()) + "," +
                           lobcli::fmt(s["n_mo_per_day"].get<double>()));
  }
  lobcli::write_csv(run, "summary.csv", manifest, "ticker,avg_spread,r1,sigma_r,n_mo",
                    summary_rows);

  // Pool imbalance samples per ticker; fit the impact models.
  std::map<std::string, std::vector<ImbalanceSample>> pooled;
  for (const DayResult& r : results)
    for (const ImbalanceSample& s : r.samples) pooled[r.files.ticker].push_back(s);

  json fits = json::object();
  for (auto& [ticker, samples] : pooled) {
    json entry;
    entry["n_samples"] = samples.size();
    auto kept = filter_imbalance_outliers(samples, outlier_k);
    entry["n_kept"] = kept.size();
    entry["correlation"] = correlation(kept);
    std::vector<double> x(kept.size());
    std::vector<double> y(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      x[i] = static_cast<double>(kept[i].delta_v);
      y[i] = kept[i].delta_m_cents;
    }
    try {
      FitOpts ols = fo;
      ols.model = "ols";
      entry["ols"] = fit_supervised(x, y, ols);
      FitOpts tree = fo;
      tree.model = "tree";
      entry["tree"] = fit_supervised(x, y, tree);
      CvScores cv_ols = kfold_cv(x, y, k, ModelKind::Ols, fo.seed);
      entry["cv_ols"] = json{{"mse_mean", cv_ols.mse_mean}, {"mse_stddev", cv_ols.mse_stddev}};
      CvScores cv_tree = kfold_cv(x, y, k, ModelKind::Tree, fo.seed,
                                  TreeParams{fo.max_depth, fo.min_samples_leaf});
      entry["cv_tree"] = json{{"mse_mean", cv_tree.mse_mean}, {"mse_stddev", cv_tree.mse_stddev}};
      KyleRegion region;
      region.quantile = fo.quantile;
      KyleLambda lam = kyle_lambda(kept, region);
      entry["kyle"] = json{{"lambda", lam.lambda},
                           {"region_hi", lam.region_hi},
                           {"n_in_region", lam.n_in_region}};
    } catch (const std::exception& e) {
      entry["error"] = e.what();
    }
    fits[ticker] = std::move(entry);
  }
  json report;
  report["window"] = window;
  report["outlier_k"] = outlier_k;
  report["k_folds"] = k;
  report["tickers"] = std::move(fits);
  lobcli::write_json(run, "fits.json", manifest, std::move(report));
  run.keep();
  return 0;
}

}  // namespace

int main(int argc, char** argv) try {
  CLI::App app{"LOBSTER limit-order-book impact estimation"};
  app.set_config("--config", "", "Key=value config file mirroring every flag");
  app.require_subcommand(1);

  CommonOpts common;
  FitOpts fit_opts;
  SynthOpts synth_opts;
  std::string mode = "signed";
  std::string bar_kind = "volume";
  std::int64_t bar_threshold = 10'000;
  std::size_t window = 10;
  std::size_t stride = 0;  // 0 = window
  double outlier_k = 3.0;
  double bin_width = 0.0;
  int k_folds = 10;
  int time_digits = 9;

  CLI::App* ingest = app.add_subcommand("ingest", "Parse, validate and re-emit LOBSTER pairs");
  add_input_options(ingest, common);
  ingest->add_option("--time-digits", time_digits, "Fractional digits on emitted timestamps")
      ->capture_default_str();

  CLI::App* impact = app.add_subcommand("impact", "Daily lag-1 response statistics");
  add_input_options(impact, common);
  add_session_options(impact, common);
  impact->add_option("--mode", mode, "Response mode: signed|clipped")
      ->capture_default_str()
      ->envname("LOBIMPACT_MODE");

  CLI::App* imbalance = app.add_subcommand("imbalance", "Order-flow imbalance samples and curve");
  add_input_options(imbalance, common);
  add_session_options(imbalance, common);
  imbalance->add_option("--mode", mode)->capture_default_str();
  imbalance->add_option("-T,--window", window, "Orders per imbalance window")
      ->capture_default_str()
      ->envname("LOBIMPACT_WINDOW");
  imbalance->add_option("--stride", stride, "Window step (0 = window, disjoint)")
      ->capture_default_str();
  imbalance->add_option("--outlier-k", outlier_k, "Stddev multiple for outlier removal")
      ->capture_default_str();
  imbalance->add_option("--bin-width", bin_width, "Imbalance bin width in shares (0 = auto)")
      ->capture_default_str();

  CLI::App* bars = app.add_subcommand("bars", "Time/tick/volume/dollar bars");
  add_input_options(bars, common);
  add_session_options(bars, common);
  bars->add_option("--kind", bar_kind, "time|tick|volume|dollar")->capture_default_str();
  bars->add_option("--threshold", bar_threshold,
                   "Bucket ns (time), trades (tick), shares (volume), 1e-4$*shares (dollar)")
      ->capture_default_str();

  CLI::App* fit = app.add_subcommand("fit", "Fit an impact model to a samples CSV");
  fit->add_option("--input", fit_opts.input, "Samples CSV (header row; # lines skipped)")
      ->required();
  fit->add_option("--model", fit_opts.model, "ols|tree|powerlaw|kyle")->capture_default_str();
  fit->add_option("--x", fit_opts.xcol, "Feature column name")->capture_default_str();
  fit->add_option("--y", fit_opts.ycol, "Response column name")->capture_default_str();
  fit->add_option("--test-fraction", fit_opts.test_fraction)->capture_default_str();
  fit->add_option("--seed", fit_opts.seed)->capture_default_str()->envname("LOBIMPACT_SEED");
  fit->add_option("--max-depth", fit_opts.max_depth)->capture_default_str();
  fit->add_option("--min-samples-leaf", fit_opts.min_samples_leaf)->capture_default_str();
  fit->add_option("--quantile", fit_opts.quantile, "Kyle linear-region |dV| quantile")
      ->capture_default_str();
  fit->add_option("--abs-cutoff", fit_opts.abs_cutoff, "Kyle region as absolute shares (overrides)")
      ->capture_default_str();
  fit->add_option("--out", fit_opts.out)->capture_default_str()->envname("LOBIMPACT_OUT");

  CLI::App* cv = app.add_subcommand("cv", "Seeded k-fold cross-validation");
  cv->add_option("--input", fit_opts.input, "Samples CSV")->required();
  cv->add_option("--model", fit_opts.model, "ols|tree")->capture_default_str();
  cv->add_option("--x", fit_opts.xcol)->capture_default_str();
  cv->add_option("--y", fit_opts.ycol)->capture_default_str();
  cv->add_option("-k,--k,--folds", k_folds)->capture_default_str()->envname("LOBIMPACT_FOLDS");
  cv->add_option("--seed", fit_opts.seed)->capture_default_str()->envname("LOBIMPACT_SEED");
  cv->add_option("--max-depth", fit_opts.max_depth)->capture_default_str();
  cv->add_option("--min-samples-leaf", fit_opts.min_samples_leaf)->capture_default_str();
  cv->add_option("--out", fit_opts.out)->capture_default_str()->envname("LOBIMPACT_OUT");

  CLI::App* synth = app.add_subcommand("synth", "Generate synthetic LOBSTER data");
  synth->add_option("--model", synth_opts.model, "zi|kyle")->capture_default_str();
  synth->add_option("--seed", synth_opts.seed)->capture_default_str()->envname("LOBIMPACT_SEED");
  synth->add_option("--out", synth_opts.out)->capture_default_str()->envname("LOBIMPACT_OUT");
  synth->add_option("--ticker", synth_opts.ticker, "Defaults to ZISIM / KYLE");
  synth->add_option("--date", synth_opts.date)->capture_default_str();
  add_session_options(synth, common);
  synth->add_option("--lo-rate", synth_opts.zi.lo_rate, "ZI limit-order rate /s")
      ->capture_default_str();
  synth->add_option("--mo-rate", synth_opts.zi.mo_rate, "ZI market-order rate /s")
      ->capture_default_str();
  synth->add_option("--cancel-rate", synth_opts.zi.cancel_rate, "ZI cancellation rate /s")
      ->capture_default_str();
  synth->add_option("--tick", synth_opts.zi.tick)->capture_default_str();
  synth->add_option("--lot", synth_opts.zi.lot)->capture_default_str();
  synth->add_option("--initial-mid", synth_opts.zi.initial_mid)->capture_default_str();
  synth->add_option("--band", synth_opts.zi.band_ticks, "ZI placement band in ticks")
      ->capture_default_str();
  synth->add_option("--seed-lots", synth_opts.zi.seed_lots_per_level)->capture_default_str();
  synth->add_option("--depth", synth_opts.zi.depth)->capture_default_str();
  synth->add_option("--lambda", synth_opts.kyle.lambda_star, "Kyle true lambda, cents/share")
      ->capture_default_str();
  synth->add_option("--noise", synth_opts.kyle.noise_stddev_cents, "Kyle mid noise stddev, cents")
      ->capture_default_str();
  synth->add_option("--size-min", synth_opts.kyle.size_min)->capture_default_str();
  synth->add_option("--size-max", synth_opts.kyle.size_max)->capture_default_str();
  synth->add_option("-n,--n-mo", synth_opts.n, "Kyle order count")->capture_default_str();

  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "Full pipeline: clip, reconstruct, imbalance, fits, CV, lambda");
  add_input_options(reproduce, common);
  add_session_options(reproduce, common);
  reproduce->add_option("--mode", mode)->capture_default_str();
  reproduce->add_option("-T,--window", window)->capture_default_str();
  reproduce->add_option("--outlier-k", outlier_k)->capture_default_str();
  reproduce->add_option("-k,--k,--folds", k_folds)->capture_default_str();
  reproduce->add_option("--test-fraction", fit_opts.test_fraction)->capture_default_str();
  reproduce->add_option("--seed", fit_opts.seed)->capture_default_str()->envname("LOBIMPACT_SEED");
  reproduce->add_option("--quantile", fit_opts.quantile)->capture_default_str();
  reproduce->add_option("--max-depth", fit_opts.max_depth)->capture_default_str();
  reproduce->add_option("--min-samples-leaf", fit_opts.min_samples_leaf)->capture_default_str();

  // --config may appear after a subcommand name; let it reach the root app.
  for (CLI::App* sub : {ingest, impact, imbalance, bars, fit, cv, synth, reproduce})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "lobimpact: " << e.what() << "\n";
    return 1;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(*ingest, common, time_digits);
    if (impact->parsed()) return cmd_impact(*impact, common, mode);
    if (imbalance->parsed())
      return cmd_imbalance(*imbalance, common, mode, window, stride, outlier_k, bin_width);
    if (bars->parsed()) return cmd_bars(*bars, common, bar_kind, bar_threshold);
    if (fit->parsed()) return cmd_fit(*fit, fit_opts);
    if (cv->parsed()) return cmd_cv(*cv, fit_opts, k_folds);
    if (synth->parsed()) return cmd_synth(*synth, synth_opts, common);
    if (reproduce->parsed())
      return cmd_reproduce(*reproduce, common, fit_opts, mode, window, outlier_k, k_folds);
  } catch (const lobcli::NoInputError& e) {
    std::cerr << "lobimpact: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lobimpact: " << e.what() << "\n";
    return 1;
  }
  return 0;
} catch (const std::exception& e) {
  std::cerr << "lobimpact: " << e.what() << "\n";
  return 1;
}
