#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>

#include "chats/completion_cache.hpp"

namespace chats {

struct CompletionRequest {
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 512;
  std::int64_t sample_seed = 0;
  std::string model_id;

  // Stable content hash over every field; identical requests share a cache entry.
  std::string cache_key() const;

  friend bool operator==(const CompletionRequest&, const CompletionRequest&) = default;
};

struct Completion {
  std::string text;
  bool truncated = false;   // the endpoint stopped on the token limit
  bool from_cache = false;
};

// Anything that turns a request into text: the HTTP client, test stubs,
// or deterministic generators.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual Completion complete(const CompletionRequest& request) = 0;
};

// Stub built from a function; used for fixtures and offline runs.
class FunctionClient final : public CompletionClient {
 public:
  using Fn = std::function<Completion(const CompletionRequest&)>;
  explicit FunctionClient(Fn fn) : fn_(std::move(fn)) {}
  Completion complete(const CompletionRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  double jitter = 0.25;  // +/- fraction of each delay
};

struct ClientConfig {
  std::string endpoint_url;  // e.g. http://localhost:8080/v1/chat/completions
  std::string api_key;
  std::filesystem::path cache_dir;
  bool cache_only = false;
  int max_in_flight = 8;
  std::chrono::seconds timeout{60};
  RetryPolicy retry;

  // CHATS_ENDPOINT_URL, CHATS_API_KEY, CHATS_CACHE_DIR, CHATS_CACHE_ONLY.
  static ClientConfig from_env();
  // Applies "key = value" lines (endpoint_url, api_key, cache_dir, cache_only,
  // max_in_flight, timeout_seconds, retry_attempts, retry_base_ms) on top of `base`.
  static ClientConfig from_file(const std::filesystem::path& path, ClientConfig base);
  static ClientConfig from_file(const std::filesystem::path& path);
};

// Reads a "key = value" file; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

// Chat-completion HTTP client with a content-addressed response cache.
//
// Request body: {"model", "messages":[{"role":"user","content"}],
// "temperature", "max_tokens", "seed"}. The reply text is read from
// choices[0].message.content (or choices[0].text); finish_reason "length"
// marks the completion as truncated.
class LlmClient final : public CompletionClient {
 public:
  explicit LlmClient(ClientConfig config);
  ~LlmClient() override;

  Completion complete(const CompletionRequest& request) override;

  std::size_t network_calls() const { return network_calls_.load(); }
  const ClientConfig& config() const { return config_; }

 private:
  Completion fetch(const CompletionRequest& request);

  ClientConfig config_;
  std::unique_ptr<CompletionCache> cache_;
  std::counting_semaphore<1024> in_flight_;
  std::atomic<std::size_t> network_calls_{0};

  // Identical requests issued concurrently share one network call.
  std::mutex pending_mu_;
  std::map<std::string, std::shared_future<Completion>> pending_;
};

}  // namespace chats
