#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lobcli {

// Exit code 2: discovery matched nothing, no artifacts were produced.
class NoInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "lobimpact 0.1.0";

std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

// One trading day's LOBSTER pair plus the identity parsed from the filename
// (<ticker>_<date>_message.csv[.gz] next to <ticker>_<date>_orderbook.csv[.gz]).
struct DayFiles {
  std::string ticker;
  std::string date;
  std::string message;
  std::string orderbook;
};

// Either an explicit pair or a directory/glob of message files.
std::vector<DayFiles> discover_days(const std::string& input, const std::string& message,
                                    const std::string& orderbook, const std::string& ticker,
                                    const std::string& date);

// Output directory that cleans up after itself unless the run commits.
// Partial artifacts never survive a failed command.
class RunDir {
 public:
  explicit RunDir(const std::filesystem::path& dir);
  ~RunDir();

  RunDir(const RunDir&) = delete;
  RunDir& operator=(const RunDir&) = delete;

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path claim(const std::string& name);  // registers for cleanup
  void keep() { keep_ = true; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> created_;
  bool keep_ = false;
};

// CSV with the manifest as a '#' comment line above the header.
void write_csv(RunDir& run, const std::string& name, const nlohmann::json& manifest,
               const std::string& header, const std::vector<std::string>& rows);

// JSON artifact carrying the manifest under "manifest".
void write_json(RunDir& run, const std::string& name, const nlohmann::json& manifest,
                nlohmann::json body);

void write_raw(RunDir& run, const std::string& name,
               const std::function<void(std::ostream&)>& fill);

// Deterministic %.10g formatting for CSV cells.
std::string fmt(double v);

// Runs fn(0..n-1) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace lobcli
