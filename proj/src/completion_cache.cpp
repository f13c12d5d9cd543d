#include "chats/completion_cache.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "chats/errors.hpp"

namespace chats {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string unique_suffix() {
  static std::atomic<unsigned> counter{0};
  std::ostringstream os;
  os << ::getpid() << "." << counter.fetch_add(1) << "." << std::random_device{}();
  return os.str();
}

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) throw IoError("cache write failed");
    off += static_cast<std::size_t>(n);
  }
}

}  // namespace

CompletionCache::CompletionCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

fs::path CompletionCache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<CacheEntry> CompletionCache::get(const std::string& key) const {
  std::ifstream in(path_for(key));
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    return std::nullopt;
  }
  CacheEntry e;
  e.key = j.value("key", key);
  e.request_json = j.value("request", json::object()).dump();
  e.completion = j.value("completion", "");
  e.truncated = j.value("truncated", false);
  e.timestamp = j.value("timestamp", "");
  e.endpoint = j.value("endpoint", "");
  return e;
}

bool CompletionCache::put(const CacheEntry& entry) {
  const fs::path final_path = path_for(entry.key);
  std::error_code ec;
  fs::create_directories(final_path.parent_path(), ec);
  if (fs::exists(final_path)) return false;

  json j;
  j["key"] = entry.key;
  j["request"] = entry.request_json.empty() ? json::object() : json::parse(entry.request_json);
  j["completion"] = entry.completion;
  j["truncated"] = entry.truncated;
  j["timestamp"] = entry.timestamp;
  j["endpoint"] = entry.endpoint;

  const fs::path tmp = final_path.parent_path() / ("." + entry.key + ".tmp." + unique_suffix());
  {
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
    if (fd < 0) throw IoError("cannot create " + tmp.string());
    write_all(fd, j.dump(2) + "\n");
    ::close(fd);
  }
  // link() refuses to replace an existing file, which keeps the cache append-only.
  const bool created = ::link(tmp.c_str(), final_path.c_str()) == 0;
  ::unlink(tmp.c_str());
  if (!created) return false;

  std::lock_guard lock(index_mu_);
  const int fd = ::open((dir_ / "index.jsonl").c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd >= 0) {
    json line = {{"key", entry.key}, {"timestamp", entry.timestamp}, {"endpoint", entry.endpoint}};
    write_all(fd, line.dump() + "\n");
    ::close(fd);
  }
  return true;
}

}  // namespace chats
