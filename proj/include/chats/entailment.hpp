#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chats/llm_client.hpp"
#include "chats/oracle.hpp"
#include "chats/prompt.hpp"
#include "chats/segmenter.hpp"
#include "chats/table.hpp"

namespace chats {

struct Verdict {
  bool entailed = false;
  std::string rationale;
  std::size_t sample_index = 0;
  bool unparseable = false;  // no answer marker; counted as refuted
  bool truncated = false;    // the completion hit the endpoint's token limit
  bool failed = false;       // backend error for this sample; counted as refuted
};

// Finds the final answer: the last "answer:" marker followed by yes/no (or
// entailed/refuted/supported/true/false), otherwise a trailing standalone
// "entailed" / "refuted" / "not entailed". Text before the marker is the
// rationale. Without a marker the verdict is refuted and flagged.
Verdict parse_verdict(std::string_view completion_text);

struct CriticConfig {
  double threshold = 0.75;          // keep a sentence iff f(s) > threshold
  int ensemble_size = 8;            // K
  double sample_temperature = 0.3;
  std::int64_t seed = 0;            // sample k uses seed + k
  int max_tokens = 512;
  std::string model_id;
  int jobs = 4;                     // sentences scored concurrently

  // Throws std::invalid_argument unless 0 < threshold < 1 and K >= 1.
  void validate() const;
};

struct SentenceScore {
  double score = 0.0;  // f(s) in [0, 1]
  std::vector<Verdict> verdicts;
  std::optional<ClaimParse> parse;
};

struct BackendCapabilities {
  bool deterministic = false;
  bool supports_rationale = false;
};

class EntailmentBackend {
 public:
  virtual ~EntailmentBackend() = default;
  virtual BackendCapabilities capabilities() const = 0;
  // Must be safe to call concurrently for distinct sentences.
  virtual SentenceScore score(const Sentence& sentence, const Table& table,
                              std::string_view title) const = 0;
  virtual std::string name() const = 0;
};

// Fraction of entailed verdicts.
double ensemble_score(const std::vector<Verdict>& verdicts);

// K sampled chain-of-thought verdicts from `client`, averaged as binary votes.
// Samples run concurrently; the result does not depend on arrival order.
// Throws BackendUnavailable only when every sample fails.
SentenceScore llm_score(const Sentence& sentence, const Table& table, std::string_view title,
                        const CriticConfig& config, CompletionClient& client,
                        const PromptTemplate& prompt);

class LlmBackend final : public EntailmentBackend {
 public:
  LlmBackend(CompletionClient& client, CriticConfig config,
             PromptTemplate prompt = PromptTemplate::builtin_critic());

  BackendCapabilities capabilities() const override { return {false, true}; }
  SentenceScore score(const Sentence& sentence, const Table& table,
                      std::string_view title) const override;
  std::string name() const override { return "llm"; }

 private:
  CompletionClient& client_;
  CriticConfig config_;
  PromptTemplate prompt_;
};

class OracleBackend final : public EntailmentBackend {
 public:
  explicit OracleBackend(OracleMode mode = OracleMode::strict) : mode_(mode) {}

  BackendCapabilities capabilities() const override { return {true, true}; }
  SentenceScore score(const Sentence& sentence, const Table& table,
                      std::string_view title) const override;
  std::string name() const override { return "oracle"; }

 private:
  OracleMode mode_;
};

// Convenience wrapper around oracle_check.
OracleResult oracle_score(const Sentence& sentence, const Table& table,
                          OracleMode mode = OracleMode::strict);

// Renders a critic prompt for one claim.
std::string render_critic_prompt(const PromptTemplate& prompt, const Table& table,
                                 std::string_view title, std::string_view claim);

}  // namespace chats
