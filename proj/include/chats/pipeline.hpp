#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chats/critic.hpp"
#include "chats/entailment.hpp"
#include "chats/llm_client.hpp"
#include "chats/prompt.hpp"
#include "chats/table.hpp"

namespace chats {

enum class Stage : unsigned { generate = 1, repair = 2, rank = 4, filter = 8 };

struct StageMask {
  unsigned bits = 0xF;

  static StageMask all() { return {}; }
  static StageMask only_generate() { return {1}; }
  // "S1,S2,S4", "all", or "1234"-style digit lists. S1 is always added.
  static StageMask parse(std::string_view text);

  bool has(Stage s) const { return (bits & static_cast<unsigned>(s)) != 0; }
  StageMask& set(Stage s, bool on = true);
  std::string to_string() const;  // e.g. "S1,S2,S3,S4"

  friend bool operator==(const StageMask&, const StageMask&) = default;
};

struct PipelineConfig {
  int num_candidates = 10;
  double generation_temperature = 0.7;
  std::int64_t seed = 0;  // candidate i uses seed + i
  int max_tokens = 512;
  std::string model_id;
  int jobs = 4;  // candidates scored concurrently
  CriticConfig critic;
  StageMask stages;

  // Throws std::invalid_argument unless N >= 1; forces S1 on.
  void validate();
};

struct Candidate {
  std::string text;
  std::int64_t sample_seed = 0;
  bool truncated = false;
};

struct GenerationResult {
  std::vector<Candidate> candidates;
  std::vector<std::string> warnings;  // failed samples when fewer than N came back
};

std::string render_generator_prompt(const PromptTemplate& prompt, const Table& table,
                                    std::string_view title);

// N samples at the generation temperature. Throws BackendUnavailable when no
// sample can be obtained.
GenerationResult generate_candidates(const Table& table, std::string_view title,
                                     CompletionClient& generator, const PipelineConfig& config,
                                     const PromptTemplate& prompt = PromptTemplate::builtin_generator());

struct RankingKey {
  double faithfulness = 0.0;
  double mean_score = 0.0;
  std::size_t kept = 0;
  std::size_t index = 0;
};

RankingKey ranking_key(const ScoredSummary& s, std::size_t index);
// True when a ranks strictly before b.
bool ranks_before(const RankingKey& a, const RankingKey& b);

struct CandidateReport {
  Candidate candidate;
  ScoredSummary scored;
  RepairedSummary repaired;
};

struct RankedResult {
  std::vector<CandidateReport> candidates;
  std::vector<std::size_t> ranking;  // candidate indices, best first
  std::size_t winner = 0;
  Summary final_summary;
  bool final_repaired = false;  // final_summary is the repaired winner
  StageMask stages;
  std::vector<std::string> warnings;
};

// Scores every candidate once, then applies the stage mask: S2 repairs each
// candidate, S3 ranks and picks a winner (candidate 0 without it), S4 drops the
// winner's unsupported sentences. Throws PipelineDegenerate when every
// candidate is empty.
RankedResult rank_candidates(std::vector<Candidate> candidates, const Table& table,
                             std::string_view title, const EntailmentBackend& backend,
                             const PipelineConfig& config);

RankedResult run_pipeline(const Table& table, std::string_view title, CompletionClient& generator,
                          const EntailmentBackend& backend, PipelineConfig config,
                          const PromptTemplate& prompt = PromptTemplate::builtin_generator());

// Sentence-level view of one ablation row: the sentences a stage setting would
// present and whether each is predicted faithful. S1 scores candidate 0 with
// every sentence kept; S2 keeps candidate 0's sentences the critic accepts; S3
// keeps every sentence of the ranked winner; S4 keeps the winner's accepted ones.
struct AblationSentence {
  std::size_t candidate = 0;
  std::size_t sentence = 0;
  std::string text;
  bool predicted_kept = true;
};

std::vector<AblationSentence> ablation_view(const RankedResult& result, int stage);

}  // namespace chats
