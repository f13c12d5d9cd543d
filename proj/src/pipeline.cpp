#include "chats/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "chats/errors.hpp"
#include "chats/parallel.hpp"
#include "chats/text.hpp"

namespace chats {

StageMask StageMask::parse(std::string_view text) {
  StageMask m{0};
  const std::string lower = to_lower(trim(text));
  if (lower.empty() || lower == "all") return all();
  for (char c : lower) {
    if (c >= '1' && c <= '4') {
      m.bits |= 1u << (c - '1');
    } else if (c != 's' && c != ',' && c != ' ' && c != '+') {
      throw std::invalid_argument("bad stage mask: " + std::string(text));
    }
  }
  m.set(Stage::generate);
  return m;
}

StageMask& StageMask::set(Stage s, bool on) {
  if (on)
    bits |= static_cast<unsigned>(s);
  else
    bits &= ~static_cast<unsigned>(s);
  return *this;
}

std::string StageMask::to_string() const {
  std::string out;
  for (int i = 0; i < 4; ++i) {
    if (bits & (1u << i)) {
      if (!out.empty()) out += ',';
      out += 'S';
      out += static_cast<char>('1' + i);
    }
  }
  return out;
}

void PipelineConfig::validate() {
  if (num_candidates < 1) throw std::invalid_argument("num_candidates must be at least 1");
  if (generation_temperature < 0.0)
    throw std::invalid_argument("generation temperature must be >= 0");
  critic.validate();
  stages.set(Stage::generate);
}

std::string render_generator_prompt(const PromptTemplate& prompt, const Table& table,
                                    std::string_view title) {
  return prompt.render(
      {{"table", serialize(table)},
       {"title", std::string(title.empty() ? std::string_view(table.title) : title)}});
}

GenerationResult generate_candidates(const Table& table, std::string_view title,
                                     CompletionClient& generator, const PipelineConfig& config,
                                     const PromptTemplate& prompt) {
  require_generator_template(prompt);
  const std::string rendered = render_generator_prompt(prompt, table, title);
  const auto n = static_cast<std::size_t>(config.num_candidates);
  std::vector<std::optional<Candidate>> slots(n);
  std::vector<std::string> errors(n);
  parallel_for(n, config.jobs, [&](std::size_t i) {
    CompletionRequest req;
    req.prompt = rendered;
    req.temperature = config.generation_temperature;
    req.max_tokens = config.max_tokens;
    req.sample_seed = config.seed + static_cast<std::int64_t>(i);
    req.model_id = config.model_id;
    try {
      Completion c = generator.complete(req);
      slots[i] = Candidate{std::string(trim(c.text)), req.sample_seed, c.truncated};
    } catch (const BackendUnavailable& e) {
      errors[i] = e.what();
    }
  });

  GenerationResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      out.candidates.push_back(std::move(*slots[i]));
    } else {
      out.warnings.push_back("candidate " + std::to_string(i) + " failed: " + errors[i]);
    }
  }
  if (out.candidates.empty())
    throw BackendUnavailable("no candidate could be generated: " + errors.front());
  return out;
}

RankingKey ranking_key(const ScoredSummary& s, std::size_t index) {
  return {s.faithfulness, s.mean_score(), s.kept_count(), index};
}

bool ranks_before(const RankingKey& a, const RankingKey& b) {
  if (a.faithfulness != b.faithfulness) return a.faithfulness > b.faithfulness;
  if (a.mean_score != b.mean_score) return a.mean_score > b.mean_score;
  if (a.kept != b.kept) return a.kept > b.kept;
  return a.index < b.index;
}

RankedResult rank_candidates(std::vector<Candidate> candidates, const Table& table,
                             std::string_view title, const EntailmentBackend& backend,
                             const PipelineConfig& config) {
  StageMask stages = config.stages;
  stages.set(Stage::generate);
  const std::size_t n = candidates.size();
  if (n == 0) throw PipelineDegenerate("no candidates");

  RankedResult out;
  out.stages = stages;
  out.candidates.resize(n);
  parallel_for(n, config.jobs, [&](std::size_t i) {
    CandidateReport& r = out.candidates[i];
    r.candidate = std::move(candidates[i]);
    r.scored = score_summary(r.candidate.text, table, title, backend, config.critic);
    if (stages.has(Stage::repair) || stages.has(Stage::filter)) r.repaired = repair(r.scored);
  });

  if (std::all_of(out.candidates.begin(), out.candidates.end(),
                  [](const CandidateReport& r) { return r.scored.empty_summary; }))
    throw PipelineDegenerate("every candidate summary is empty");

  out.ranking.resize(n);
  std::iota(out.ranking.begin(), out.ranking.end(), std::size_t{0});
  if (stages.has(Stage::rank)) {
    std::vector<RankingKey> keys;
    keys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) keys.push_back(ranking_key(out.candidates[i].scored, i));
    std::sort(out.ranking.begin(), out.ranking.end(),
              [&](std::size_t a, std::size_t b) { return ranks_before(keys[a], keys[b]); });
  }
  out.winner = out.ranking.front();

  const CandidateReport& w = out.candidates[out.winner];
  if (stages.has(Stage::filter)) {
    out.final_summary = w.repaired.summary;
    out.final_repaired = true;
  } else {
    out.final_summary = w.scored.summary;
  }
  return out;
}

RankedResult run_pipeline(const Table& table, std::string_view title, CompletionClient& generator,
                          const EntailmentBackend& backend, PipelineConfig config,
                          const PromptTemplate& prompt) {
  config.validate();
  GenerationResult gen = generate_candidates(table, title, generator, config, prompt);
  RankedResult out = rank_candidates(std::move(gen.candidates), table, title, backend, config);
  out.warnings.insert(out.warnings.begin(), gen.warnings.begin(), gen.warnings.end());
  return out;
}

std::vector<AblationSentence> ablation_view(const RankedResult& result, int stage) {
  if (stage < 1 || stage > 4) throw std::invalid_argument("stage must be 1..4");
  const std::size_t cand = stage <= 2 ? 0 : result.winner;
  const bool use_critic = stage == 2 || stage == 4;
  const ScoredSummary& s = result.candidates.at(cand).scored;
  std::vector<AblationSentence> out;
  for (std::size_t i = 0; i < s.summary.size(); ++i)
    out.push_back({cand, i, s.summary.sentences[i].text, use_critic ? s.kept_mask[i] : true});
  return out;
}

}  // namespace chats
