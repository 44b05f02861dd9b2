#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace qcensus {

namespace fs = std::filesystem;

inline std::string fnv1a_hex(const std::string& s)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Writes through a temporary file in the same directory and renames it into place.
inline void atomic_write(const fs::path& path, const std::string& data)
{
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot write " + tmp.string());
    os << data;
    os.flush();
    if (!os) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot replace " + path.string());
  }
}

inline std::optional<std::string> read_file(const fs::path& path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

struct GcSummary {
  std::size_t entries_before = 0;
  std::uintmax_t bytes_before = 0;
  std::size_t evicted = 0;
  std::uintmax_t bytes_after = 0;
};

// Versioned key-value store of JSON documents, one file per entry. Readers see either a
// complete old entry or a complete new one.
class Cache {
public:
  static constexpr const char* kSchema = "qcensus.cache/1";

  Cache() = default;
  explicit Cache(fs::path dir) : dir_(std::move(dir)) {}

  bool enabled() const { return !dir_.empty(); }
  const fs::path& dir() const { return dir_; }

  fs::path entry_path(const std::string& kind, const std::string& key) const { return dir_ / kind / (fnv1a_hex(key) + ".json"); }

  std::optional<nlohmann::json> get(const std::string& kind, const std::string& key) const
  {
    if (!enabled()) return std::nullopt;
    fs::path p = entry_path(kind, key);
    auto text = read_file(p);
    if (!text) return std::nullopt;
    nlohmann::json j = nlohmann::json::parse(*text, nullptr, false);
    if (j.is_discarded() || j.value("schema", "") != kSchema || j.value("key", "") != key) return std::nullopt;
    std::error_code ec;
    fs::last_write_time(p, fs::file_time_type::clock::now(), ec);  // recency for eviction
    return j["value"];
  }

  void put(const std::string& kind, const std::string& key, const nlohmann::json& value) const
  {
    if (!enabled()) return;
    nlohmann::json j{{"schema", kSchema}, {"key", key}, {"value", value}};
    atomic_write(entry_path(kind, key), j.dump());
  }

  // Evicts least recently used entries until the total size is at most max_bytes.
  GcSummary gc(std::uintmax_t max_bytes) const
  {
    GcSummary s;
    if (!enabled()) return s;
    std::error_code ec;
    if (!fs::exists(dir_, ec)) throw IoError("cache directory does not exist: " + dir_.string());
    struct Entry {
      fs::path path;
      std::uintmax_t size;
      fs::file_time_type time;
    };
    std::vector<Entry> entries;
    for (auto it = fs::recursive_directory_iterator(dir_, ec); !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
      if (!it->is_regular_file() || it->path().extension() != ".json") continue;
      Entry e{it->path(), it->file_size(), it->last_write_time()};
      entries.push_back(e);
    }
    if (ec) throw IoError("cannot scan cache directory: " + ec.message());
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.time != b.time ? a.time < b.time : a.path < b.path;
    });
    s.entries_before = entries.size();
    for (const auto& e : entries) s.bytes_before += e.size;
    std::uintmax_t total = s.bytes_before;
    for (const auto& e : entries) {
      if (total <= max_bytes) break;
      fs::remove(e.path, ec);
      if (ec) throw IoError("cannot evict " + e.path.string() + ": " + ec.message());
      total -= e.size;
      ++s.evicted;
    }
    s.bytes_after = total;
    return s;
  }

private:
  fs::path dir_;
};

} // namespace qcensus
