#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lobimpact/types.hpp"

namespace lobimpact {

// LOBSTER 'message' file: Time,Type,OrderID,Size,Price,Direction per row.
// Times are decimal seconds after midnight with 0..9 fractional digits and
// convert to integer nanoseconds exactly. Throws ParseError / RejectedRowError.
// `reserve_rows` is an optional capacity hint (keeps peak memory flat when
// the caller knows the file size).
std::vector<EventRecord> parse_message_file(std::istream& in, std::size_t reserve_rows = 0);

// LOBSTER 'orderbook' file: 4*depth columns per row,
// AskPrice1,AskVol1,BidPrice1,BidVol1,AskPrice2,...
// A crossed level-1 book (ask <= bid) raises StreamValidationError with the
// offending row index.
SnapshotSeries parse_orderbook_file(std::istream& in, int depth = 1,
                                    std::size_t reserve_rows = 0);

// Path-based readers. "-" reads standard input; a ".gz" suffix (or gzip
// magic bytes) selects transparent decompression.
std::vector<EventRecord> read_message_file(const std::string& path);
SnapshotSeries read_orderbook_file(const std::string& path, int depth = 1);

// Aligns one message row with one book row. Throws std::invalid_argument on
// length mismatch (reporting both lengths) and StreamValidationError when
// time steps backwards.
MergedStream merge_streams(std::vector<EventRecord> events, SnapshotSeries books,
                           StreamMeta meta);

// Soft re-check of every per-row invariant. Violations are data, not errors:
// an empty report means the stream is clean.
std::vector<Violation> validate_stream(const MergedStream& stream);

// Re-emits the stream as a LOBSTER file pair. `time_digits` fixes the number
// of fractional digits (LOBSTER ships 9); parsing then re-emitting a
// canonical input of the same digit count reproduces it byte for byte.
void emit_lobster_files(const MergedStream& stream, std::ostream& message_out,
                        std::ostream& orderbook_out, int time_digits = 9);

// Timestamp helpers used by the emitters and the CLI.
std::string format_time(TimeNs t, int digits);
TimeNs parse_hhmm(const std::string& hhmm);  // "10:30" -> ns after midnight

}  // namespace lobimpact
