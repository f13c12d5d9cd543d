#include "chats/llm_client.hpp"

#include <httplib.h>

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <thread>

#include "chats/errors.hpp"
#include "chats/text.hpp"

namespace chats {

using nlohmann::json;

std::string CompletionRequest::cache_key() const {
  const json j = {{"max_tokens", max_tokens},
                  {"model_id", model_id},
                  {"prompt", prompt},
                  {"sample_seed", sample_seed},
                  {"temperature", temperature}};
  return sha256_hex(j.dump());
}

namespace {

std::string request_json(const CompletionRequest& r) {
  return json{{"max_tokens", r.max_tokens},
              {"model_id", r.model_id},
              {"prompt", r.prompt},
              {"sample_seed", r.sample_seed},
              {"temperature", r.temperature}}
      .dump();
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool parse_bool(std::string_view v) {
  const std::string s = to_lower(trim(v));
  return s == "1" || s == "true" || s == "yes" || s == "on";
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw BackendUnavailable("endpoint URL lacks a scheme: " + url);
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

enum class Outcome { ok, retry, fatal, auth };

}  // namespace

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    out[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
  }
  return out;
}

ClientConfig ClientConfig::from_env() {
  ClientConfig c;
  if (const char* v = std::getenv("CHATS_ENDPOINT_URL")) c.endpoint_url = v;
  if (const char* v = std::getenv("CHATS_API_KEY")) c.api_key = v;
  if (const char* v = std::getenv("CHATS_CACHE_DIR")) c.cache_dir = v;
  if (const char* v = std::getenv("CHATS_CACHE_ONLY")) c.cache_only = parse_bool(v);
  return c;
}

ClientConfig ClientConfig::from_file(const std::filesystem::path& path) {
  return from_file(path, ClientConfig{});
}

ClientConfig ClientConfig::from_file(const std::filesystem::path& path, ClientConfig base) {
  for (const auto& [key, value] : read_key_value_file(path)) {
    if (key == "endpoint_url") base.endpoint_url = value;
    else if (key == "api_key") base.api_key = value;
    else if (key == "cache_dir") base.cache_dir = value;
    else if (key == "cache_only") base.cache_only = parse_bool(value);
    else if (key == "max_in_flight") base.max_in_flight = std::stoi(value);
    else if (key == "timeout_seconds") base.timeout = std::chrono::seconds(std::stoi(value));
    else if (key == "retry_attempts") base.retry.max_attempts = std::stoi(value);
    else if (key == "retry_base_ms") base.retry.base_delay = std::chrono::milliseconds(std::stoi(value));
  }
  return base;
}

LlmClient::LlmClient(ClientConfig config)
    : config_(std::move(config)), in_flight_(std::clamp(config_.max_in_flight, 1, 1024)) {
  if (!config_.cache_dir.empty()) cache_ = std::make_unique<CompletionCache>(config_.cache_dir);
}

LlmClient::~LlmClient() = default;

Completion LlmClient::complete(const CompletionRequest& request) {
  const std::string key = request.cache_key();
  if (cache_) {
    if (auto hit = cache_->get(key)) return {hit->completion, hit->truncated, true};
  }
  if (config_.cache_only) throw CacheMiss("cache-only mode and no entry for key " + key);

  std::shared_future<Completion> shared;
  std::promise<Completion> promise;
  bool owner = false;
  {
    std::lock_guard lock(pending_mu_);
    auto it = pending_.find(key);
    if (it != pending_.end()) {
      shared = it->second;
    } else {
      shared = promise.get_future().share();
      pending_.emplace(key, shared);
      owner = true;
    }
  }
  if (!owner) return shared.get();

  try {
    Completion c = fetch(request);
    if (cache_) {
      CacheEntry entry;
      entry.key = key;
      entry.request_json = request_json(request);
      entry.completion = c.text;
      entry.truncated = c.truncated;
      entry.timestamp = utc_now();
      entry.endpoint = sha256_hex(config_.endpoint_url).substr(0, 16);
      if (!cache_->put(entry)) {
        // Another writer won; the stored entry is authoritative.
        if (auto stored = cache_->get(key)) c = {stored->completion, stored->truncated, true};
      }
    }
    promise.set_value(c);
  } catch (...) {
    promise.set_exception(std::current_exception());
  }
  {
    std::lock_guard lock(pending_mu_);
    pending_.erase(key);
  }
  return shared.get();
}

Completion LlmClient::fetch(const CompletionRequest& request) {
  if (config_.endpoint_url.empty()) throw BackendUnavailable("no completion endpoint configured");
  const SplitUrl url = split_url(config_.endpoint_url);

  json body;
  body["model"] = request.model_id;
  body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  body["seed"] = request.sample_seed;
  const std::string payload = body.dump();

  std::mt19937 jitter_rng(std::random_device{}());
  std::uniform_real_distribution<double> jitter(-config_.retry.jitter, config_.retry.jitter);

  std::string last_error = "no attempt made";
  auto delay = std::chrono::duration<double, std::milli>(config_.retry.base_delay);
  for (int attempt = 1; attempt <= std::max(1, config_.retry.max_attempts); ++attempt) {
    Outcome outcome = Outcome::retry;
    Completion result;
    {
      in_flight_.acquire();
      struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
      } release{in_flight_};

      httplib::Client cli(url.origin);
      cli.set_connection_timeout(config_.timeout);
      cli.set_read_timeout(config_.timeout);
      httplib::Headers headers;
      if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
      ++network_calls_;
      auto res = cli.Post(url.path, headers, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
      } else if (res->status == 401 || res->status == 403) {
        last_error = "HTTP " + std::to_string(res->status);
        outcome = Outcome::auth;
      } else if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
      } else if (res->status < 200 || res->status >= 300) {
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
        outcome = Outcome::fatal;
      } else {
        try {
          const json reply = json::parse(res->body);
          const json& choice = reply.at("choices").at(0);
          if (choice.contains("message")) {
            result.text = choice["message"].value("content", "");
          } else {
            result.text = choice.value("text", "");
          }
          result.truncated = choice.value("finish_reason", "") == "length";
          outcome = Outcome::ok;
        } catch (const json::exception& e) {
          last_error = std::string("malformed completion body: ") + e.what();
          outcome = Outcome::fatal;
        }
      }
    }
    if (outcome == Outcome::ok) return result;
    if (outcome == Outcome::auth) throw AuthError("endpoint rejected credentials (" + last_error + ")");
    if (outcome == Outcome::fatal) throw BackendUnavailable(last_error);
    if (attempt < config_.retry.max_attempts) {
      const double factor = 1.0 + jitter(jitter_rng);
      std::this_thread::sleep_for(delay * factor);
      delay *= config_.retry.factor;
    }
  }
  throw BackendUnavailable("retries exhausted: " + last_error);
}

}  // namespace chats
