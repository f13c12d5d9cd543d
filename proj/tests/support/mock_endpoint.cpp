#include "mock_endpoint.hpp"

#include <httplib.h>

#include <json.hpp>

#include "chats/table.hpp"
#include "chats/text.hpp"

namespace chats::testing {

using nlohmann::json;

namespace {

std::string between(const std::string& s, const std::string& open, const std::string& close) {
  const auto task = s.rfind("### Task");
  const auto from = s.find(open, task == std::string::npos ? 0 : task);
  if (from == std::string::npos) return {};
  const auto begin = from + open.size();
  const auto end = s.find(close, begin);
  return s.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
}

}  // namespace

std::string prompt_table_text(const std::string& prompt) {
  const std::string close = trim(prompt).ends_with("Summary:") ? "\nSummary:" : "\nClaim:";
  return std::string(trim(between(prompt, "Table:\n", close)));
}

std::string mock_critic_reply(const std::string& prompt, std::int64_t seed, int flip_percent) {
  const std::string claim(trim(between(prompt, "\nClaim: ", "\nReasoning:")));
  const Table table = parse_linearized(prompt_table_text(prompt)).table;
  const OracleResult r = oracle_check(claim, table);
  bool yes = r.score > 0.5;
  if (flip_percent > 0) {
    const std::string h = sha256_hex(prompt + "#" + std::to_string(seed));
    const int bucket = std::stoi(h.substr(0, 6), nullptr, 16) % 100;
    if (bucket < flip_percent) yes = !yes;
  }
  return "The claim is a " + std::string(to_string(r.parse.kind)) + " statement; " + r.parse.note +
         ". Answer: " + (yes ? "Yes" : "No");
}

void MockCompletionLogic::add_fixtures(const std::string& table_text,
                                       std::vector<std::string> summaries) {
  fixtures_[std::string(trim(table_text))] = std::move(summaries);
}

std::string MockCompletionLogic::reply(const std::string& prompt, std::int64_t seed) const {
  const std::string body(trim(prompt));
  if (body.ends_with("Reasoning:")) return mock_critic_reply(body, seed, flip_percent_);
  if (body.ends_with("Summary:")) {
    const auto it = fixtures_.find(prompt_table_text(body));
    if (it == fixtures_.end() || it->second.empty()) return "";
    const auto n = static_cast<std::int64_t>(it->second.size());
    return it->second[static_cast<std::size_t>(((seed % n) + n) % n)];
  }
  return "I cannot help with that.";
}

std::unique_ptr<CompletionClient> mock_client(std::shared_ptr<MockCompletionLogic> logic) {
  return std::make_unique<FunctionClient>([logic](const CompletionRequest& r) {
    return Completion{logic->reply(r.prompt, r.sample_seed), false, false};
  });
}

MockEndpoint::MockEndpoint(std::shared_ptr<MockCompletionLogic> logic)
    : logic_(std::move(logic)), server_(std::make_unique<httplib::Server>()) {
  server_->Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    {
      std::lock_guard lock(mu_);
      if (!required_key_.empty() && req.get_header_value("Authorization") != "Bearer " + required_key_) {
        res.status = 401;
        return;
      }
      if (!statuses_.empty()) {
        res.status = statuses_.front();
        statuses_.pop_front();
        res.set_content("{\"error\":\"queued\"}", "application/json");
        return;
      }
    }
    const json body = json::parse(req.body);
    const std::string prompt = body.at("messages").at(0).at("content").get<std::string>();
    const std::int64_t seed = body.value("seed", std::int64_t{0});
    std::string finish;
    {
      std::lock_guard lock(mu_);
      finish = finish_reason_;
    }
    const json reply{{"id", "mock"},
                     {"object", "chat.completion"},
                     {"choices", json::array({{{"index", 0},
                                               {"message", {{"role", "assistant"},
                                                            {"content", logic_->reply(prompt, seed)}}},
                                               {"finish_reason", finish}}})}};
    res.set_content(reply.dump(), "application/json");
  });
  port_ = server_->bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

MockEndpoint::~MockEndpoint() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockEndpoint::url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
}

void MockEndpoint::queue_statuses(std::vector<int> statuses) {
  std::lock_guard lock(mu_);
  statuses_.assign(statuses.begin(), statuses.end());
}

void MockEndpoint::set_finish_reason(std::string reason) {
  std::lock_guard lock(mu_);
  finish_reason_ = std::move(reason);
}

void MockEndpoint::set_required_key(std::string key) {
  std::lock_guard lock(mu_);
  required_key_ = std::move(key);
}

}  // namespace chats::testing
