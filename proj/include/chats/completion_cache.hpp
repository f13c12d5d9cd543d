#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

namespace chats {

struct CacheEntry {
  std::string key;
  std::string request_json;  // canonical request serialization
  std::string completion;
  bool truncated = false;
  std::string timestamp;     // UTC, ISO-8601
  std::string endpoint;      // fingerprint of the endpoint that produced it
};

// Append-only, one JSON file per entry at <dir>/<key[0:2]>/<key>.json plus an
// index manifest <dir>/index.jsonl. Entries are written to a temporary file
// and hard-linked into place, so readers never see partial files and an
// existing key is never overwritten.
class CompletionCache {
 public:
  explicit CompletionCache(std::filesystem::path dir);

  std::optional<CacheEntry> get(const std::string& key) const;

  // Returns false when the key already existed (the stored entry wins).
  bool put(const CacheEntry& entry);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;

  std::filesystem::path dir_;
  std::mutex index_mu_;
};

}  // namespace chats
