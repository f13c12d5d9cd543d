#pragma once

#include <string_view>
#include <vector>

#include "chats/entailment.hpp"
#include "chats/segmenter.hpp"
#include "chats/table.hpp"

namespace chats {

struct ScoredSummary {
  Summary summary;
  std::vector<double> sentence_scores;
  std::vector<std::vector<Verdict>> verdicts;  // per sentence
  std::vector<bool> kept_mask;                 // sentence_scores[i] > threshold
  double threshold = 0.75;
  double faithfulness = 0.0;  // F(S): kept / |S|; 0 for an empty summary
  bool empty_summary = false;

  std::size_t kept_count() const;
  double mean_score() const;  // 0 for an empty summary
};

// F(S) = (1/|S|) * #{i : f(s_i) > T}. Empty input gives 0.
double summary_faithfulness(const std::vector<double>& scores, double threshold);

// Assembles a ScoredSummary from precomputed sentence scores.
ScoredSummary make_scored_summary(Summary summary, std::vector<double> scores, double threshold,
                                  std::vector<std::vector<Verdict>> verdicts = {});

// Segments and scores every sentence with `backend`; sentences are scored
// concurrently (config.jobs) and reassembled in order.
ScoredSummary score_summary(std::string_view summary_text, const Table& table,
                            std::string_view title, const EntailmentBackend& backend,
                            const CriticConfig& config);

struct DroppedSentence {
  std::size_t index = 0;
  double score = 0.0;
  std::string text;
};

struct RepairedSummary {
  Summary summary;  // kept sentences, original order, joined by one space
  std::vector<DroppedSentence> dropped;
  // F over the retained sentences using the original scores: 1 when anything
  // is kept, 0 otherwise.
  double faithfulness_post = 0.0;
};

RepairedSummary repair(const ScoredSummary& scored);

}  // namespace chats
