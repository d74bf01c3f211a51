#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lobimpact {

// Nanoseconds after midnight. LOBSTER timestamps carry up to nine
// fractional digits; integer nanoseconds represent every legal value
// exactly, so no float round-trip ever touches a timestamp.
using TimeNs = std::int64_t;

// Prices are integers in units of 1e-4 dollars (2158800 == $215.88).
using Price = std::int32_t;
using Shares = std::int32_t;

inline constexpr TimeNs kNsPerSecond = 1'000'000'000;
inline constexpr TimeNs kNsPerDay = TimeNs{86'400} * kNsPerSecond;

// Price-unit conversions: 100 units of 1e-4 dollars = 1 dollar cent.
inline constexpr double kUnitsPerCent = 100.0;

enum class EventType : std::uint8_t {
  Submission = 1,
  Cancellation = 2,  // partial delete
  Deletion = 3,      // total delete
  ExecVisible = 4,
  ExecHidden = 5,
  CrossTrade = 6,
  Halt = 7,
};

inline bool is_execution(EventType t) {
  return t == EventType::ExecVisible || t == EventType::ExecHidden;
}

// One row of a LOBSTER message file.
//
// `direction` labels the side of the limit order the event touched
// (+1 buy LO, -1 sell LO). For executions the matched market order has
// the opposite sign: direction -1 means a buy MO lifted a sell LO.
struct EventRecord {
  TimeNs time = 0;
  std::int64_t order_id = 0;  // 0 => hidden order
  Price price = 0;
  Shares size = 0;
  EventType type = EventType::Submission;
  std::int8_t direction = 0;  // +1 or -1

  bool is_execution() const { return lobimpact::is_execution(type); }
  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

// One book level: best-to-worse quotes, level 1 first.
struct QuoteLevel {
  Price ask_price = 0;
  Shares ask_volume = 0;
  Price bid_price = 0;
  Shares bid_volume = 0;

  Price spread() const { return ask_price - bid_price; }
  friend bool operator==(const QuoteLevel&, const QuoteLevel&) = default;
};

// Mid-price with exact half-unit resolution: stores ask+bid so that
// (a+b)/2 never rounds. `twice` is in 1e-4 dollar units.
struct MidPrice {
  std::int64_t twice = 0;

  double units() const { return 0.5 * static_cast<double>(twice); }
  double cents() const { return static_cast<double>(twice) / 200.0; }
  double dollars() const { return static_cast<double>(twice) / 20000.0; }

  friend auto operator<=>(const MidPrice&, const MidPrice&) = default;
};

// Exact (in double) signed distance in dollar cents.
inline double cents_between(MidPrice from, MidPrice to) {
  return static_cast<double>(to.twice - from.twice) / 200.0;
}

// Snapshot rows stored columnar (size() rows of depth() levels each) so a
// million-row day costs one flat allocation instead of one per row.
class SnapshotSeries {
 public:
  SnapshotSeries() = default;
  explicit SnapshotSeries(int depth) : depth_(depth) {
    if (depth < 1) throw std::invalid_argument("snapshot depth must be >= 1");
  }

  int depth() const { return depth_; }
  std::size_t size() const { return levels_.size() / static_cast<std::size_t>(depth_); }
  bool empty() const { return levels_.empty(); }

  std::span<const QuoteLevel> row(std::size_t i) const {
    return {levels_.data() + i * static_cast<std::size_t>(depth_),
            static_cast<std::size_t>(depth_)};
  }
  // Level-1 quotes of row i.
  const QuoteLevel& best(std::size_t i) const {
    return levels_[i * static_cast<std::size_t>(depth_)];
  }

  void push_row(std::span<const QuoteLevel> levels) {
    levels_.insert(levels_.end(), levels.begin(), levels.end());
  }
  void reserve_rows(std::size_t n) { levels_.reserve(n * static_cast<std::size_t>(depth_)); }

  friend bool operator==(const SnapshotSeries&, const SnapshotSeries&) = default;

 private:
  int depth_ = 1;
  std::vector<QuoteLevel> levels_;
};

struct StreamMeta {
  std::string ticker;
  std::string date;  // YYYY-MM-DD
  int depth = 1;
};

// Message rows and their aligned post-event book states.
// Snapshot i is the book immediately AFTER event i, so the state
// immediately before event i is snapshot i-1.
struct MergedStream {
  std::vector<EventRecord> events;
  SnapshotSeries books;
  StreamMeta meta;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
};

// A market order reconstructed from consecutive same-timestamp,
// same-direction execution rows.
struct MarketOrder {
  TimeNs time = 0;
  int sign = 0;  // +1 buy MO, -1 sell MO; always -direction of its fills
  std::int64_t total_size = 0;
  int n_fills = 0;
  bool contains_hidden = false;
  bool price_changing = false;
  // True when no later MO existed and mid_after_next fell back to the mid
  // right after this order's own last fill.
  bool last_of_day = false;
  MidPrice mid_before;      // mid immediately before the first fill
  MidPrice mid_after_next;  // mid immediately before the next MO
  Price spread_before = 0;
  std::int64_t opposite_best_volume_before = 0;
};

struct Violation {
  std::size_t index = 0;
  std::string kind;
  std::string message;
};

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

// Malformed input that could not be tokenized/converted. 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed row whose values violate the format contract.
class RejectedRowError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Structural violation detected at a known row (e.g. crossed book).
class StreamValidationError : public std::runtime_error {
 public:
  StreamValidationError(std::size_t row, const std::string& what)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero-intelligence simulation ran one book side dry.
class SimulationHaltError : public std::runtime_error {
 public:
  SimulationHaltError(TimeNs reached, const std::string& what)
      : std::runtime_error(what), time_reached_(reached) {}
  TimeNs time_reached() const { return time_reached_; }

 private:
  TimeNs time_reached_;
};

}  // namespace lobimpact
