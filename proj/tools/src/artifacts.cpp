#include "artifacts.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace lobcli {

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

// <ticker>_<date>_message.csv[.gz] -> ticker/date; empty ticker on mismatch.
bool split_message_name(const std::string& filename, std::string& ticker, std::string& date) {
  std::string stem = filename;
  for (const char* suffix : {".gz", ".csv"}) {
    if (stem.size() > std::strlen(suffix) && stem.ends_with(suffix))
      stem.resize(stem.size() - std::strlen(suffix));
  }
  const std::string tag = "_message";
  if (!stem.ends_with(tag)) return false;
  stem.resize(stem.size() - tag.size());
  std::size_t underscore = stem.find('_');
  if (underscore == std::string::npos || underscore == 0 || underscore + 1 >= stem.size())
    return false;
  ticker = stem.substr(0, underscore);
  date = stem.substr(underscore + 1);
  return true;
}

std::string sibling_orderbook(const std::string& message_path) {
  std::string path = message_path;
  std::size_t at = path.rfind("_message");
  path.replace(at, std::strlen("_message"), "_orderbook");
  return path;
}

}  // namespace

std::vector<DayFiles> discover_days(const std::string& input, const std::string& message,
                                    const std::string& orderbook, const std::string& ticker,
                                    const std::string& date) {
  std::vector<DayFiles> days;
  if (!message.empty()) {
    if (orderbook.empty())
      throw std::runtime_error("--message needs a matching --orderbook");
    std::string t = ticker;
    std::string d = date;
    std::string name = fs::path(message).filename().string();
    std::string file_ticker;
    std::string file_date;
    if (split_message_name(name, file_ticker, file_date)) {
      if (t.empty()) t = file_ticker;
      if (d.empty()) d = file_date;
    }
    days.push_back(DayFiles{t.empty() ? "UNKNOWN" : t, d.empty() ? "1970-01-01" : d, message,
                            orderbook});
    return days;
  }
  if (input.empty()) throw NoInputError("no input files matched");

  fs::path base(input);
  std::string pattern = "*_message.csv*";
  if (!fs::is_directory(base)) {
    pattern = base.filename().string();
    base = base.parent_path().empty() ? fs::path(".") : base.parent_path();
  }
  if (!fs::is_directory(base)) throw NoInputError("no input files matched " + input);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(base)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (fnmatch(pattern.c_str(), name.c_str(), 0) != 0) continue;
    if (name.find("_message") == std::string::npos) continue;
    names.push_back(entry.path().string());
  }
  std::sort(names.begin(), names.end());
  for (const std::string& path : names) {
    DayFiles day;
    if (!split_message_name(fs::path(path).filename().string(), day.ticker, day.date)) continue;
    day.message = path;
    day.orderbook = sibling_orderbook(path);
    if (!fs::exists(day.orderbook)) continue;
    days.push_back(day);
  }
  if (days.empty()) throw NoInputError("no input files matched " + input);
  return days;
}

RunDir::RunDir(const fs::path& dir) : dir_(dir) { fs::create_directories(dir_); }

RunDir::~RunDir() {
  if (keep_) return;
  std::error_code ec;
  for (const auto& path : created_) fs::remove(path, ec);
}

fs::path RunDir::claim(const std::string& name) {
  fs::path path = dir_ / name;
  created_.push_back(path);
  return path;
}

void write_csv(RunDir& run, const std::string& name, const nlohmann::json& manifest,
               const std::string& header, const std::vector<std::string>& rows) {
  std::ofstream out(run.claim(name), std::ios::binary);
  out << "# manifest: " << manifest.dump() << "\n" << header << "\n";
  for (const std::string& row : rows) out << row << "\n";
  if (!out) throw std::runtime_error("failed writing " + name);
}

void write_json(RunDir& run, const std::string& name, const nlohmann::json& manifest,
                nlohmann::json body) {
  body["manifest"] = manifest;
  std::ofstream out(run.claim(name), std::ios::binary);
  out << body.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing " + name);
}

void write_raw(RunDir& run, const std::string& name,
               const std::function<void(std::ostream&)>& fill) {
  std::ofstream out(run.claim(name), std::ios::binary);
  fill(out);
  if (!out) throw std::runtime_error("failed writing " + name);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int count = std::min<int>(jobs, static_cast<int>(n));
  pool.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lobcli
