#include "chats/app/reports.hpp"

#include "chats/app/manifest.hpp"

namespace chats {

using nlohmann::json;

json to_json(const Verdict& v) {
  json j{{"entailed", v.entailed}, {"rationale", v.rationale}, {"sample_index", v.sample_index}};
  if (v.unparseable) j["unparseable"] = true;
  if (v.truncated) j["truncated"] = true;
  if (v.failed) j["failed"] = true;
  return j;
}

json to_json(const ScoredSummary& s) {
  json sentences = json::array();
  for (std::size_t i = 0; i < s.summary.size(); ++i) {
    const Sentence& sent = s.summary.sentences[i];
    json verdicts = json::array();
    if (i < s.verdicts.size())
      for (const auto& v : s.verdicts[i]) verdicts.push_back(to_json(v));
    sentences.push_back({{"index", sent.index},
                         {"text", sent.text},
                         {"begin", sent.begin},
                         {"end", sent.end},
                         {"score", s.sentence_scores[i]},
                         {"kept", static_cast<bool>(s.kept_mask[i])},
                         {"verdicts", verdicts}});
  }
  return {{"summary", s.summary.text},
          {"sentences", sentences},
          {"threshold", s.threshold},
          {"faithfulness", s.faithfulness},
          {"mean_score", s.mean_score()},
          {"kept", s.kept_count()},
          {"empty_summary", s.empty_summary}};
}

json to_json(const RepairedSummary& r) {
  json dropped = json::array();
  for (const auto& d : r.dropped)
    dropped.push_back({{"index", d.index}, {"score", d.score}, {"text", d.text}});
  return {{"summary", r.summary.text},
          {"dropped", dropped},
          {"faithfulness_post", r.faithfulness_post}};
}

json to_json(const RankedResult& r) {
  json candidates = json::array();
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const CandidateReport& c = r.candidates[i];
    json cj{{"index", i},
            {"sample_seed", c.candidate.sample_seed},
            {"text", c.candidate.text},
            {"scored", to_json(c.scored)}};
    if (c.candidate.truncated) cj["truncated"] = true;
    if (r.stages.has(Stage::repair) || r.stages.has(Stage::filter))
      cj["repaired"] = to_json(c.repaired);
    candidates.push_back(std::move(cj));
  }
  return {{"stages", r.stages.to_string()},
          {"candidates", candidates},
          {"ranking", r.ranking},
          {"winner", r.winner},
          {"final_summary", r.final_summary.text},
          {"final_repaired", r.final_repaired},
          {"warnings", r.warnings}};
}

json to_json(const ClassifierReport& r) {
  json flags = json::array();
  if (r.single_class) flags.push_back("single_class");
  if (r.auc_undefined) flags.push_back("auc_undefined");
  if (r.precision_undefined) flags.push_back("precision_undefined");
  if (r.recall_undefined) flags.push_back("recall_undefined");
  return {{"accuracy", r.accuracy},
          {"balanced_accuracy", r.balanced_accuracy},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"auc", r.auc},
          {"threshold", number_json(r.threshold)},
          {"counts", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}}},
          {"flags", flags}};
}

json to_json(const CorrelationReport& r) {
  json j{{"pearson", r.pearson}, {"p_value", r.p_value}, {"n", r.n}};
  if (r.threshold) j["threshold"] = number_json(*r.threshold);
  if (r.degenerate_variance) j["flags"] = json::array({"degenerate_variance"});
  return j;
}

json to_json(const SweepResult& r) {
  return {{"threshold", number_json(r.threshold)},
          {"report", to_json(r.report)},
          {"degenerate", r.degenerate},
          {"candidates_tried", r.candidates_tried}};
}

json to_json(const KappaResult& r) {
  return {{"kappa", r.kappa}, {"observed", r.observed}, {"expected", r.expected},
          {"undefined", r.undefined}};
}

}  // namespace chats
