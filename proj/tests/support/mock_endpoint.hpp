#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "chats/llm_client.hpp"
#include "chats/oracle.hpp"

namespace httplib {
class Server;
}

namespace chats::testing {

// Answers rendered critic prompts (ending in "Reasoning:") with the oracle's
// verdict; `flip_percent` of (prompt, seed) pairs get the opposite answer,
// chosen by a hash so replies are deterministic.
std::string mock_critic_reply(const std::string& prompt, std::int64_t seed, int flip_percent = 0);

// Pulls the "Table:" block out of a rendered prompt.
std::string prompt_table_text(const std::string& prompt);

// In-process stand-in for the endpoint: critic prompts go to
// mock_critic_reply, generator prompts (ending in "Summary:") return
// fixtures[table text][seed mod n].
class MockCompletionLogic {
 public:
  explicit MockCompletionLogic(int flip_percent = 0) : flip_percent_(flip_percent) {}
  void add_fixtures(const std::string& table_text, std::vector<std::string> summaries);
  std::string reply(const std::string& prompt, std::int64_t seed) const;

 private:
  int flip_percent_;
  std::map<std::string, std::vector<std::string>> fixtures_;
};

// FunctionClient over MockCompletionLogic.
std::unique_ptr<CompletionClient> mock_client(std::shared_ptr<MockCompletionLogic> logic);

// HTTP chat-completion server on 127.0.0.1 with an ephemeral port.
class MockEndpoint {
 public:
  explicit MockEndpoint(std::shared_ptr<MockCompletionLogic> logic);
  ~MockEndpoint();

  std::string url() const;  // http://127.0.0.1:<port>/v1/chat/completions
  std::size_t requests() const { return requests_.load(); }

  // Status codes returned (in order) before normal replies resume.
  void queue_statuses(std::vector<int> statuses);
  void set_finish_reason(std::string reason);
  void set_required_key(std::string key);

 private:
  std::shared_ptr<MockCompletionLogic> logic_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> requests_{0};
  std::mutex mu_;
  std::deque<int> statuses_;
  std::string finish_reason_ = "stop";
  std::string required_key_;
};

}  // namespace chats::testing
