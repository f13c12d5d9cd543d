#include "chats/critic.hpp"

#include <algorithm>
#include <numeric>

#include "chats/parallel.hpp"

namespace chats {

std::size_t ScoredSummary::kept_count() const {
  return static_cast<std::size_t>(std::count(kept_mask.begin(), kept_mask.end(), true));
}

double ScoredSummary::mean_score() const {
  if (sentence_scores.empty()) return 0.0;
  return std::accumulate(sentence_scores.begin(), sentence_scores.end(), 0.0) /
         static_cast<double>(sentence_scores.size());
}

double summary_faithfulness(const std::vector<double>& scores, double threshold) {
  if (scores.empty()) return 0.0;
  std::size_t kept = 0;
  for (double s : scores) kept += s > threshold ? 1 : 0;
  return static_cast<double>(kept) / static_cast<double>(scores.size());
}

ScoredSummary make_scored_summary(Summary summary, std::vector<double> scores, double threshold,
                                  std::vector<std::vector<Verdict>> verdicts) {
  ScoredSummary out;
  out.summary = std::move(summary);
  out.threshold = threshold;
  out.kept_mask.reserve(scores.size());
  for (double s : scores) out.kept_mask.push_back(s > threshold);
  out.faithfulness = summary_faithfulness(scores, threshold);
  out.empty_summary = scores.empty();
  out.sentence_scores = std::move(scores);
  if (verdicts.empty()) verdicts.resize(out.sentence_scores.size());
  out.verdicts = std::move(verdicts);
  return out;
}

ScoredSummary score_summary(std::string_view summary_text, const Table& table,
                            std::string_view title, const EntailmentBackend& backend,
                            const CriticConfig& config) {
  config.validate();
  Summary summary = segment(summary_text);
  const std::size_t n = summary.size();
  std::vector<double> scores(n);
  std::vector<std::vector<Verdict>> verdicts(n);
  parallel_for(n, config.jobs, [&](std::size_t i) {
    SentenceScore s = backend.score(summary.sentences[i], table, title);
    scores[i] = s.score;
    verdicts[i] = std::move(s.verdicts);
  });
  return make_scored_summary(std::move(summary), std::move(scores), config.threshold,
                             std::move(verdicts));
}

RepairedSummary repair(const ScoredSummary& scored) {
  RepairedSummary out;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < scored.summary.size(); ++i) {
    if (scored.kept_mask[i]) {
      kept.push_back(scored.summary.sentences[i].text);
    } else {
      out.dropped.push_back({i, scored.sentence_scores[i], scored.summary.sentences[i].text});
    }
  }
  out.summary = join_sentences(kept);
  out.faithfulness_post = kept.empty() ? 0.0 : 1.0;
  return out;
}

}  // namespace chats
