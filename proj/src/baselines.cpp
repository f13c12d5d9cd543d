#include "chats/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>

#include "chats/errors.hpp"
#include "chats/text.hpp"

namespace chats {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_ascii_space(text[i])) {
      flush();
    } else if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if ((c == '.' || c == ',') && !cur.empty() && is_ascii_digit(cur.back()) &&
               i + 1 < text.size() && is_ascii_digit(text[i + 1])) {
      cur += static_cast<char>(c);
    } else {
      flush();
      out.emplace_back(1, static_cast<char>(c));
    }
  }
  flush();
  return out;
}

namespace {

using Ngrams = std::map<std::vector<std::string>, std::size_t>;

Ngrams count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  Ngrams out;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++out[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return out;
}

std::size_t closest_length(std::size_t c, const std::vector<std::vector<std::string>>& refs) {
  std::size_t best = refs.front().size();
  for (const auto& r : refs) {
    const auto d = [&](std::size_t len) { return len > c ? len - c : c - len; };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
  }
  return best;
}

// log of the geometric mean, with the smoothing and empty-order rules.
double log_geo_precision(const std::vector<double>& num, const std::vector<std::size_t>& den) {
  double acc = 0.0;
  for (std::size_t k = 0; k < num.size(); ++k) {
    if (den[k] == 0) continue;  // log 1
    const double m = num[k] > 0.0 ? num[k] : kBleuEpsilon;
    acc += std::log(m / static_cast<double>(den[k]));
  }
  return acc / static_cast<double>(num.size());
}

}  // namespace

BleuStats bleu_stats(const std::vector<std::string>& candidate,
                     const std::vector<std::vector<std::string>>& references, int max_order) {
  if (max_order < 1) throw std::invalid_argument("max_order must be >= 1");
  if (references.empty()) throw std::invalid_argument("BLEU needs at least one reference");
  BleuStats s;
  s.candidate_length = candidate.size();
  s.reference_length = closest_length(candidate.size(), references);
  for (int n = 1; n <= max_order; ++n) {
    const Ngrams cand = count_ngrams(candidate, static_cast<std::size_t>(n));
    Ngrams max_ref;
    for (const auto& r : references)
      for (const auto& [g, cnt] : count_ngrams(r, static_cast<std::size_t>(n)))
        max_ref[g] = std::max(max_ref[g], cnt);
    std::size_t match = 0, total = 0;
    for (const auto& [g, cnt] : cand) {
      total += cnt;
      const auto it = max_ref.find(g);
      if (it != max_ref.end()) match += std::min(cnt, it->second);
    }
    s.matches.push_back(match);
    s.totals.push_back(total);
  }
  return s;
}

double bleu_from_stats(const BleuStats& stats) {
  if (stats.candidate_length == 0) return 0.0;
  const std::vector<double> num(stats.matches.begin(), stats.matches.end());
  const double log_p = log_geo_precision(num, stats.totals);
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  const double log_bp = c < r ? 1.0 - r / c : 0.0;
  return std::exp(log_bp + log_p);
}

double bleu(std::string_view candidate, const std::vector<std::string>& references, int max_order) {
  const auto cand = tokenize(candidate);
  if (cand.empty()) throw EmptyCandidate("BLEU candidate has no tokens");
  std::vector<std::vector<std::string>> refs;
  refs.reserve(references.size());
  for (const auto& r : references) refs.push_back(tokenize(r));
  return bleu_from_stats(bleu_stats(cand, refs, max_order));
}

double corpus_bleu(const std::vector<std::string>& candidates,
                   const std::vector<std::vector<std::string>>& references, int max_order) {
  if (candidates.size() != references.size())
    throw LengthMismatch("corpus BLEU needs one reference list per candidate");
  BleuStats total;
  total.matches.assign(static_cast<std::size_t>(max_order), 0);
  total.totals.assign(static_cast<std::size_t>(max_order), 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::vector<std::vector<std::string>> refs;
    for (const auto& r : references[i]) refs.push_back(tokenize(r));
    const BleuStats s = bleu_stats(tokenize(candidates[i]), refs, max_order);
    for (std::size_t k = 0; k < s.matches.size(); ++k) {
      total.matches[k] += s.matches[k];
      total.totals[k] += s.totals[k];
    }
    total.candidate_length += s.candidate_length;
    total.reference_length += s.reference_length;
  }
  return bleu_from_stats(total);
}

std::vector<std::string> table_tokens(const Table& table) {
  std::vector<std::string> out;
  auto add = [&](std::string_view text) {
    for (auto& t : tokenize(text)) out.push_back(std::move(t));
  };
  for (const auto& h : table.headers) add(h);
  for (const auto& row : table.rows)
    for (const auto& cell : row) add(cell.raw());
  return out;
}

ParentScore parent_detail(std::string_view candidate, std::string_view reference,
                          const Table& table, double lambda, int max_order) {
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must lie in [0, 1]");
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  const auto tab = table_tokens(table);
  const std::set<std::string> table_set(tab.begin(), tab.end());

  std::vector<double> p_num, r_num;
  std::vector<std::size_t> p_den, r_den;
  for (int n = 1; n <= max_order; ++n) {
    const Ngrams c = count_ngrams(cand, static_cast<std::size_t>(n));
    const Ngrams r = count_ngrams(ref, static_cast<std::size_t>(n));
    double correct = 0.0, recalled = 0.0;
    std::size_t c_total = 0, r_total = 0;
    for (const auto& [g, cnt] : c) {
      c_total += cnt;
      const bool in_table = std::all_of(g.begin(), g.end(),
                                        [&](const std::string& t) { return table_set.count(t) > 0; });
      const auto it = r.find(g);
      const std::size_t clipped = it == r.end() ? 0 : std::min(cnt, it->second);
      correct += static_cast<double>(in_table ? cnt : clipped);
    }
    for (const auto& [g, cnt] : r) {
      r_total += cnt;
      const auto it = c.find(g);
      if (it != c.end()) recalled += static_cast<double>(std::min(cnt, it->second));
    }
    p_num.push_back(correct);
    p_den.push_back(c_total);
    r_num.push_back(recalled);
    r_den.push_back(r_total);
  }

  ParentScore s;
  s.precision = cand.empty() ? 0.0 : std::exp(log_geo_precision(p_num, p_den));
  s.reference_recall = ref.empty() ? 0.0 : std::exp(log_geo_precision(r_num, r_den));
  if (table_set.empty()) {
    s.table_recall = 0.0;
  } else {
    const std::set<std::string> cand_set(cand.begin(), cand.end());
    std::size_t hit = 0;
    for (const auto& t : table_set) hit += cand_set.count(t);
    s.table_recall = static_cast<double>(hit) / static_cast<double>(table_set.size());
  }
  if (lambda == 0.0) {
    s.recall = s.reference_recall;
  } else if (lambda == 1.0) {
    s.recall = s.table_recall;
  } else {
    s.recall = std::pow(s.reference_recall, 1.0 - lambda) * std::pow(s.table_recall, lambda);
  }
  s.f = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                     : 0.0;
  return s;
}

double parent(std::string_view candidate, std::string_view reference, const Table& table,
              double lambda) {
  return parent_detail(candidate, reference, table, lambda).f;
}

}  // namespace chats
