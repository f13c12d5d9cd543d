#include "chats/entailment.hpp"

#include <stdexcept>

#include "chats/errors.hpp"
#include "chats/parallel.hpp"
#include "chats/text.hpp"

namespace chats {

namespace {

enum class Answer { yes, no, unknown };

Answer classify_answer_word(std::string_view w) {
  static constexpr std::string_view kYes[] = {"yes", "entailed", "supported", "true", "entails"};
  static constexpr std::string_view kNo[] = {"no", "refuted", "false", "not", "unsupported",
                                             "contradicted"};
  for (auto y : kYes)
    if (w == y) return Answer::yes;
  for (auto n : kNo)
    if (w == n) return Answer::no;
  return Answer::unknown;
}

// First alphabetic word at or after `pos`, lowercased.
std::string first_word_from(std::string_view text, std::size_t pos) {
  while (pos < text.size() && !is_ascii_alpha(text[pos])) ++pos;
  std::size_t end = pos;
  while (end < text.size() && is_ascii_alpha(text[end])) ++end;
  return to_lower(text.substr(pos, end - pos));
}

}  // namespace

Verdict parse_verdict(std::string_view completion_text) {
  Verdict v;
  const std::string_view text = trim(completion_text);
  const std::string lower = to_lower(text);

  const auto marker = lower.rfind("answer:");
  if (marker != std::string::npos) {
    const Answer a = classify_answer_word(first_word_from(lower, marker + 7));
    if (a != Answer::unknown) {
      v.entailed = a == Answer::yes;
      v.rationale = std::string(trim(text.substr(0, marker)));
      return v;
    }
  } else {
    // Trailing standalone verdict word, e.g. "... so the claim is entailed."
    std::size_t end = lower.size();
    while (end > 0 && !is_ascii_alpha(lower[end - 1])) --end;
    std::size_t begin = end;
    while (begin > 0 && is_ascii_alpha(lower[begin - 1])) --begin;
    const std::string_view last = std::string_view(lower).substr(begin, end - begin);
    if (last == "entailed" || last == "refuted") {
      std::size_t prev_end = begin;
      while (prev_end > 0 && !is_ascii_alpha(lower[prev_end - 1])) --prev_end;
      std::size_t prev_begin = prev_end;
      while (prev_begin > 0 && is_ascii_alpha(lower[prev_begin - 1])) --prev_begin;
      const bool negated = std::string_view(lower).substr(prev_begin, prev_end - prev_begin) == "not";
      v.entailed = last == "entailed" && !negated;
      v.rationale = std::string(trim(text.substr(0, negated ? prev_begin : begin)));
      return v;
    }
  }
  v.entailed = false;
  v.unparseable = true;
  v.rationale = "[unparseable verdict] " + std::string(text);
  return v;
}

void CriticConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("critic threshold must lie in (0, 1)");
  if (ensemble_size < 1) throw std::invalid_argument("ensemble size must be at least 1");
  if (sample_temperature < 0.0) throw std::invalid_argument("sample temperature must be >= 0");
}

double ensemble_score(const std::vector<Verdict>& verdicts) {
  if (verdicts.empty()) return 0.0;
  std::size_t yes = 0;
  for (const auto& v : verdicts) yes += v.entailed ? 1 : 0;
  return static_cast<double>(yes) / static_cast<double>(verdicts.size());
}

std::string render_critic_prompt(const PromptTemplate& prompt, const Table& table,
                                 std::string_view title, std::string_view claim) {
  return prompt.render({{"table", serialize(table)},
                        {"title", std::string(title.empty() ? std::string_view(table.title) : title)},
                        {"claim", std::string(claim)}});
}

SentenceScore llm_score(const Sentence& sentence, const Table& table, std::string_view title,
                        const CriticConfig& config, CompletionClient& client,
                        const PromptTemplate& prompt) {
  config.validate();
  const std::string rendered = render_critic_prompt(prompt, table, title, sentence.text);
  const auto k = static_cast<std::size_t>(config.ensemble_size);
  std::vector<Verdict> verdicts(k);
  std::vector<std::string> errors(k);

  parallel_for(k, config.ensemble_size, [&](std::size_t i) {
    CompletionRequest req;
    req.prompt = rendered;
    req.temperature = config.sample_temperature;
    req.max_tokens = config.max_tokens;
    req.sample_seed = config.seed + static_cast<std::int64_t>(i);
    req.model_id = config.model_id;
    try {
      const Completion c = client.complete(req);
      Verdict v = parse_verdict(c.text);
      v.truncated = c.truncated;
      verdicts[i] = std::move(v);
    } catch (const BackendUnavailable& e) {
      Verdict v;
      v.failed = true;
      v.rationale = std::string("[backend error] ") + e.what();
      verdicts[i] = std::move(v);
      errors[i] = e.what();
    }
    verdicts[i].sample_index = i;
  });

  std::size_t failures = 0;
  for (const auto& v : verdicts) failures += v.failed ? 1 : 0;
  if (failures == k) throw BackendUnavailable("all " + std::to_string(k) +
                                              " critic samples failed: " + errors.front());

  SentenceScore out;
  out.score = ensemble_score(verdicts);
  out.verdicts = std::move(verdicts);
  return out;
}

LlmBackend::LlmBackend(CompletionClient& client, CriticConfig config, PromptTemplate prompt)
    : client_(client), config_(std::move(config)), prompt_(std::move(prompt)) {
  config_.validate();
  require_critic_template(prompt_);
}

SentenceScore LlmBackend::score(const Sentence& sentence, const Table& table,
                                std::string_view title) const {
  return llm_score(sentence, table, title, config_, client_, prompt_);
}

OracleResult oracle_score(const Sentence& sentence, const Table& table, OracleMode mode) {
  return oracle_check(sentence.text, table, mode);
}

SentenceScore OracleBackend::score(const Sentence& sentence, const Table& table,
                                   std::string_view) const {
  OracleResult r = oracle_check(sentence.text, table, mode_);
  SentenceScore out;
  out.score = r.score;
  Verdict v;
  v.entailed = r.score > 0.5;
  v.rationale = std::string(to_string(r.parse.kind)) + ": " + r.parse.note;
  out.verdicts.push_back(std::move(v));
  out.parse = std::move(r.parse);
  return out;
}

}  // namespace chats
