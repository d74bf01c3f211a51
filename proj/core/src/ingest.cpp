#include "lobimpact/ingest.hpp"

#include <zlib.h>

#include <array>
#include <charconv>
#include <filesystem>
#include <cstdio>
#include <cstring>
#include <istream>
#include <memory>
#include <ostream>
#include <utility>

namespace lobimpact {
namespace {

constexpr std::size_t kChunkSize = 1 << 20;

// Splits an istream into lines without copying whole files into memory.
// Tolerates CRLF and a missing final newline.
class LineScanner {
 public:
  explicit LineScanner(std::istream& in) : in_(in) { buf_.resize(kChunkSize); }

  // Returns false at EOF. `line` stays valid until the next call.
  bool next(std::string_view& line) {
    for (;;) {
      if (pos_ < end_) {
        const char* base = buf_.data();
        const void* nl = std::memchr(base + pos_, '\n', end_ - pos_);
        if (nl != nullptr) {
          std::size_t eol = static_cast<std::size_t>(static_cast<const char*>(nl) - base);
          line = trim(std::string_view(base + pos_, eol - pos_));
          pos_ = eol + 1;
          return true;
        }
      }
      // Shift the partial tail to the front and refill.
      std::size_t tail = end_ - pos_;
      if (tail > 0 && pos_ > 0) std::memmove(buf_.data(), buf_.data() + pos_, tail);
      pos_ = 0;
      end_ = tail;
      if (end_ == buf_.size()) buf_.resize(buf_.size() * 2);
      in_.read(buf_.data() + end_, static_cast<std::streamsize>(buf_.size() - end_));
      std::size_t got = static_cast<std::size_t>(in_.gcount());
      if (got == 0) {
        if (end_ == 0) return false;
        line = trim(std::string_view(buf_.data(), end_));
        pos_ = end_ = 0;
        return true;
      }
      end_ += got;
    }
  }

 private:
  static std::string_view trim(std::string_view v) {
    while (!v.empty() && (v.back() == '\r' || v.back() == ' ')) v.remove_suffix(1);
    return v;
  }

  std::istream& in_;
  std::string buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

template <typename Int>
bool parse_int(std::string_view field, Int& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects leading '+'
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

// Decimal seconds -> integer nanoseconds, digit by digit; no doubles involved.
bool parse_time_ns(std::string_view field, TimeNs& out) {
  std::size_t dot = field.find('.');
  std::string_view whole = field.substr(0, dot);
  std::int64_t seconds = 0;
  if (!parse_int(whole, seconds) || seconds < 0) return false;
  std::int64_t frac = 0;
  int digits = 0;
  if (dot != std::string_view::npos) {
    std::string_view tail = field.substr(dot + 1);
    if (tail.size() > 9) return false;  // contract: at most nanoseconds
    for (char c : tail) {
      if (c < '0' || c > '9') return false;
      frac = frac * 10 + (c - '0');
      ++digits;
    }
  }
  for (; digits < 9; ++digits) frac *= 10;
  out = seconds * kNsPerSecond + frac;
  return true;
}

// Comma-splitter over one row. Exactly `N` fields expected by callers.
class FieldCursor {
 public:
  explicit FieldCursor(std::string_view row) : rest_(row) {}

  bool next(std::string_view& field) {
    if (done_) return false;
    std::size_t comma = rest_.find(',');
    if (comma == std::string_view::npos) {
      field = rest_;
      done_ = true;
    } else {
      field = rest_.substr(0, comma);
      rest_.remove_prefix(comma + 1);
    }
    return true;
  }
  bool exhausted() const { return done_; }

 private:
  std::string_view rest_;
  bool done_ = false;
};

EventRecord parse_message_row(std::string_view row, std::size_t lineno) {
  FieldCursor cur(row);
  std::array<std::string_view, 6> f;
  for (auto& field : f) {
    if (!cur.next(field)) throw ParseError(lineno, "expected 6 fields, got fewer");
  }
  if (!cur.exhausted()) throw ParseError(lineno, "expected 6 fields, got more");

  EventRecord rec;
  if (!parse_time_ns(f[0], rec.time)) throw ParseError(lineno, "bad timestamp '" + std::string(f[0]) + "'");
  int type = 0;
  if (!parse_int(f[1], type)) throw ParseError(lineno, "bad event type '" + std::string(f[1]) + "'");
  if (!parse_int(f[2], rec.order_id)) throw ParseError(lineno, "bad order id '" + std::string(f[2]) + "'");
  if (!parse_int(f[3], rec.size)) throw ParseError(lineno, "bad size '" + std::string(f[3]) + "'");
  if (!parse_int(f[4], rec.price)) throw ParseError(lineno, "bad price '" + std::string(f[4]) + "'");
  int direction = 0;
  if (!parse_int(f[5], direction)) throw ParseError(lineno, "bad direction '" + std::string(f[5]) + "'");

  if (type < 1 || type > 7) throw RejectedRowError(lineno, "event type " + std::to_string(type) + " outside 1..7");
  if (rec.size <= 0) throw RejectedRowError(lineno, "non-positive size");
  if (rec.price <= 0) throw RejectedRowError(lineno, "non-positive price");
  if (direction != 1 && direction != -1) throw RejectedRowError(lineno, "direction must be +1 or -1");
  if (rec.time < 0 || rec.time >= kNsPerDay) throw RejectedRowError(lineno, "timestamp outside trading day");
  if (rec.order_id < 0) throw RejectedRowError(lineno, "negative order id");

  rec.type = static_cast<EventType>(type);
  rec.direction = static_cast<std::int8_t>(direction);
  return rec;
}

// gzFile-backed streambuf so gzip and plain files share one parse path
// (zlib passes uncompressed bytes straight through in transparent mode).
class GzStreamBuf : public std::streambuf {
 public:
  explicit GzStreamBuf(gzFile file) : file_(file) { buf_.resize(kChunkSize); }
  ~GzStreamBuf() override {
    if (file_ != nullptr) gzclose(file_);
  }

 protected:
  int_type underflow() override {
    int got = gzread(file_, buf_.data(), static_cast<unsigned>(buf_.size()));
    if (got <= 0) return traits_type::eof();
    setg(buf_.data(), buf_.data(), buf_.data() + got);
    return traits_type::to_int_type(*gptr());
  }

 private:
  gzFile file_;
  std::vector<char> buf_;
};

class GzInputStream : public std::istream {
 public:
  explicit GzInputStream(const std::string& path) : std::istream(nullptr) {
    gzFile f = path == "-" ? gzdopen(0, "rb") : gzopen(path.c_str(), "rb");
    if (f == nullptr) throw std::runtime_error("cannot open " + path);
    gzbuffer(f, kChunkSize);
    buf_ = std::make_unique<GzStreamBuf>(f);
    rdbuf(buf_.get());
  }

 private:
  std::unique_ptr<GzStreamBuf> buf_;
};

void append_int(std::string& out, std::int64_t v) {
  char tmp[24];
  auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
  out.append(tmp, ptr);
}

}  // namespace

std::vector<EventRecord> parse_message_file(std::istream& in, std::size_t reserve_rows) {
  std::vector<EventRecord> records;
  records.reserve(reserve_rows);
  LineScanner scanner(in);
  std::string_view line;
  std::size_t lineno = 0;
  while (scanner.next(line)) {
    ++lineno;
    if (line.empty()) continue;
    records.push_back(parse_message_row(line, lineno));
  }
  return records;
}

SnapshotSeries parse_orderbook_file(std::istream& in, int depth, std::size_t reserve_rows) {
  SnapshotSeries series(depth);
  series.reserve_rows(reserve_rows);
  std::vector<QuoteLevel> row(static_cast<std::size_t>(depth));
  LineScanner scanner(in);
  std::string_view line;
  std::size_t lineno = 0;
  while (scanner.next(line)) {
    ++lineno;
    if (line.empty()) continue;
    FieldCursor cur(line);
    std::string_view field;
    for (int lvl = 0; lvl < depth; ++lvl) {
      QuoteLevel& q = row[static_cast<std::size_t>(lvl)];
      std::int32_t* slots[4] = {&q.ask_price, &q.ask_volume, &q.bid_price, &q.bid_volume};
      for (auto* slot : slots) {
        if (!cur.next(field) || !parse_int(field, *slot))
          throw ParseError(lineno, "expected " + std::to_string(4 * depth) + " integer columns");
      }
    }
    if (!cur.exhausted()) throw ParseError(lineno, "expected " + std::to_string(4 * depth) + " columns, got more");
    if (row[0].ask_price <= row[0].bid_price)
      throw StreamValidationError(lineno - 1, "crossed book (ask <= bid)");
    series.push_row(row);
  }
  return series;
}

namespace {

// Row-count hint from the on-disk size; compressed inputs use a rough
// expansion factor. Only a reserve, never a bound.
std::size_t row_hint(const std::string& path, std::size_t bytes_per_row) {
  if (path == "-") return 0;
  std::error_code ec;
  auto size = std::filesystem::file_size(path, ec);
  if (ec) return 0;
  if (path.ends_with(".gz")) size *= 4;
  return static_cast<std::size_t>(size / bytes_per_row);
}

}  // namespace

std::vector<EventRecord> read_message_file(const std::string& path) {
  GzInputStream in(path);
  return parse_message_file(in, row_hint(path, 30));
}

SnapshotSeries read_orderbook_file(const std::string& path, int depth) {
  GzInputStream in(path);
  return parse_orderbook_file(in, depth, row_hint(path, 20 * static_cast<std::size_t>(depth)));
}

MergedStream merge_streams(std::vector<EventRecord> events, SnapshotSeries books,
                           StreamMeta meta) {
  if (events.size() != books.size()) {
    throw std::invalid_argument("stream length mismatch: " + std::to_string(events.size()) +
                                " events vs " + std::to_string(books.size()) + " snapshots");
  }
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].time < events[i - 1].time)
      throw StreamValidationError(i, "time regression");
  }
  meta.depth = books.depth();
  return MergedStream{std::move(events), std::move(books), std::move(meta)};
}

std::vector<Violation> validate_stream(const MergedStream& stream) {
  std::vector<Violation> report;
  auto add = [&](std::size_t i, const char* kind, std::string msg) {
    report.push_back(Violation{i, kind, std::move(msg)});
  };

  if (stream.events.size() != stream.books.size())
    add(0, "length mismatch",
        std::to_string(stream.events.size()) + " events vs " +
            std::to_string(stream.books.size()) + " snapshots");

  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const EventRecord& e = stream.events[i];
    if (e.time < 0 || e.time >= kNsPerDay) add(i, "time out of range", std::to_string(e.time) + " ns");
    if (i > 0 && e.time < stream.events[i - 1].time) add(i, "non-monotone time", "");
    if (e.size <= 0) add(i, "non-positive size", std::to_string(e.size));
    if (e.price <= 0) add(i, "non-positive price", std::to_string(e.price));
    if (e.direction != 1 && e.direction != -1)
      add(i, "bad direction", std::to_string(static_cast<int>(e.direction)));
    auto type = static_cast<int>(e.type);
    if (type < 1 || type > 7) add(i, "bad event type", std::to_string(type));
    if (e.type == EventType::ExecHidden && e.order_id != 0)
      add(i, "hidden execution with nonzero order id", std::to_string(e.order_id));
  }

  for (std::size_t i = 0; i < stream.books.size(); ++i) {
    auto row = stream.books.row(i);
    if (row[0].ask_price <= row[0].bid_price) add(i, "crossed book", "");
    for (std::size_t lvl = 0; lvl < row.size(); ++lvl) {
      if (row[lvl].ask_volume <= 0 || row[lvl].bid_volume <= 0)
        add(i, "non-positive level volume", "level " + std::to_string(lvl + 1));
      if (lvl > 0) {
        if (row[lvl].ask_price <= row[lvl - 1].ask_price)
          add(i, "ask levels not increasing", "level " + std::to_string(lvl + 1));
        if (row[lvl].bid_price >= row[lvl - 1].bid_price)
          add(i, "bid levels not decreasing", "level " + std::to_string(lvl + 1));
      }
    }
  }
  return report;
}

std::string format_time(TimeNs t, int digits) {
  std::string out;
  append_int(out, t / kNsPerSecond);
  if (digits > 0) {
    std::int64_t frac = t % kNsPerSecond;
    char tail[16];
    std::snprintf(tail, sizeof(tail), "%09lld", static_cast<long long>(frac));
    out.push_back('.');
    out.append(tail, static_cast<std::size_t>(digits));
  }
  return out;
}

TimeNs parse_hhmm(const std::string& hhmm) {
  int h = 0;
  int m = 0;
  if (std::sscanf(hhmm.c_str(), "%d:%d", &h, &m) != 2 || h < 0 || h > 24 || m < 0 || m > 59)
    throw std::invalid_argument("bad HH:MM time '" + hhmm + "'");
  return (TimeNs{h} * 3600 + TimeNs{m} * 60) * kNsPerSecond;
}

void emit_lobster_files(const MergedStream& stream, std::ostream& message_out,
                        std::ostream& orderbook_out, int time_digits) {
  if (time_digits < 0 || time_digits > 9)
    throw std::invalid_argument("time_digits must be in 0..9");
  std::string msg;
  std::string book;
  msg.reserve(1 << 16);
  book.reserve(1 << 16);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const EventRecord& e = stream.events[i];
    msg += format_time(e.time, time_digits);
    msg.push_back(',');
    append_int(msg, static_cast<int>(e.type));
    msg.push_back(',');
    append_int(msg, e.order_id);
    msg.push_back(',');
    append_int(msg, e.size);
    msg.push_back(',');
    append_int(msg, e.price);
    msg.push_back(',');
    append_int(msg, e.direction);
    msg.push_back('\n');

    for (const QuoteLevel& q : stream.books.row(i)) {
      if (&q != &stream.books.row(i).front()) book.push_back(',');
      append_int(book, q.ask_price);
      book.push_back(',');
      append_int(book, q.ask_volume);
      book.push_back(',');
      append_int(book, q.bid_price);
      book.push_back(',');
      append_int(book, q.bid_volume);
    }
    book.push_back('\n');

    if (msg.size() > kChunkSize) {
      message_out.write(msg.data(), static_cast<std::streamsize>(msg.size()));
      msg.clear();
    }
    if (book.size() > kChunkSize) {
      orderbook_out.write(book.data(), static_cast<std::streamsize>(book.size()));
      book.clear();
    }
  }
  message_out.write(msg.data(), static_cast<std::streamsize>(msg.size()));
  orderbook_out.write(book.data(), static_cast<std::streamsize>(book.size()));
}

}  // namespace lobimpact
