#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chats/entailment.hpp"
#include "chats/llm_client.hpp"
#include "chats/oracle.hpp"
#include "chats/pipeline.hpp"
#include "chats/table.hpp"

namespace chats {

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitBackend = 3 };

// Completion endpoint settings shared by every command: environment first,
// then the config file, then explicit flags.
struct EndpointOptions {
  std::optional<std::filesystem::path> config_file;
  std::optional<std::string> endpoint_url;
  std::optional<std::filesystem::path> cache_dir;
  bool cache_only = false;
  std::string model_id;
  std::optional<int> retry_base_ms;

  ClientConfig resolve() const;
};

struct CriticOptions {
  std::string backend = "oracle";  // oracle | llm
  OracleMode oracle_mode = OracleMode::strict;
  CriticConfig critic;
  std::optional<std::filesystem::path> critic_template;
};

struct ScoreOptions {
  std::filesystem::path input;
  std::filesystem::path output;  // JSONL report; aggregate and manifest sit next to it
  TableSource table_source = TableSource::gold;
  CriticOptions critic;
  EndpointOptions endpoint;
  int jobs = 4;  // examples in flight
};

struct PipelineOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  TableSource table_source = TableSource::gold;
  std::string generator = "dataset";  // dataset | llm
  PipelineConfig pipeline;
  CriticOptions critic;
  EndpointOptions endpoint;
  std::optional<std::filesystem::path> generator_template;
  int jobs = 2;
};

struct MetaevalOptions {
  std::filesystem::path predictions;  // score report
  std::filesystem::path annotations;
  std::filesystem::path output;       // JSON report; PR curves go to <output stem>.pr/
  std::vector<std::string> metrics;   // empty = critic, noop, bleu, parent
  bool sweep = false;
  double sentence_threshold = 0.75;
  double summary_threshold = 0.9;
  double baseline_threshold = 0.5;
};

struct ServeOptions {
  std::filesystem::path dataset;
  std::filesystem::path output;  // annotation JSONL
  std::string host = "127.0.0.1";
  int port = 8765;
  std::optional<std::filesystem::path> static_dir;
  double overlap = 0.0;
};

// Each returns an exit code and writes diagnostics to `err`.
int cmd_score(const ScoreOptions& opts, std::ostream& err);
int cmd_pipeline(const PipelineOptions& opts, std::ostream& err);
int cmd_metaeval(const MetaevalOptions& opts, std::ostream& err);
int cmd_serve(const ServeOptions& opts, std::ostream& err);

// Stub generator that replays a record's candidate summaries: the request
// with seed `base_seed + i` returns candidates[i mod n].
class ReplayGenerator final : public CompletionClient {
 public:
  ReplayGenerator(std::vector<std::string> candidates, std::int64_t base_seed);
  Completion complete(const CompletionRequest& request) override;

 private:
  std::vector<std::string> candidates_;
  std::int64_t base_seed_;
};

}  // namespace chats
