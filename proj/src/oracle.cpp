#include "chats/oracle.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "chats/text.hpp"

namespace chats {

std::string_view to_string(ClaimKind kind) {
  switch (kind) {
    case ClaimKind::unparsed: return "unparsed";
    case ClaimKind::point: return "point";
    case ClaimKind::comparison: return "comparison";
    case ClaimKind::extremum: return "extremum";
    case ClaimKind::aggregate: return "aggregate";
    case ClaimKind::delta: return "delta";
  }
  return "unparsed";
}

namespace {

// ---------------------------------------------------------------------------
// Words

struct Word {
  std::string norm;
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool is_word_char(char ch) { return is_ascii_alpha(ch) || is_ascii_digit(ch); }

std::string normalize_word(std::string w) {
  w = to_lower(w);
  if (w.size() > 4 && w.ends_with("ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 3 && w.back() == 's' && !w.ends_with("ss") && !w.ends_with("us") &&
      !w.ends_with("is")) {
    w.pop_back();
  }
  return w;
}

std::vector<Word> words_of(std::string_view text) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    Word w;
    w.norm = normalize_word(std::string(text.substr(i, j - i)));
    w.begin = i;
    w.end = j;
    // Possessive "'s" is dropped.
    if (j + 1 < text.size() && text[j] == '\'' && (text[j + 1] == 's' || text[j + 1] == 'S') &&
        (j + 2 >= text.size() || !is_word_char(text[j + 2]))) {
      j += 2;
    }
    out.push_back(std::move(w));
    i = j;
  }
  return out;
}

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> s = {
      "the", "a", "an", "of", "in", "on", "and", "or", "to", "for", "at", "by", "is", "are",
      "was", "were", "be", "with", "from", "value", "share", "number", "rate", "total"};
  return s;
}

// ---------------------------------------------------------------------------
// Numbers

struct SuffixWord {
  std::string_view text;
  Unit unit;
};

constexpr SuffixWord kUnitWords[] = {
    {"per cent", Unit::percent}, {"percent", Unit::percent},   {"thousand", Unit::thousand},
    {"million", Unit::million},  {"billion", Unit::billion},   {"bn", Unit::billion},
    {"mn", Unit::million},
};

constexpr std::string_view kApproximators[] = {"around", "about",  "approximately", "approx",
                                               "roughly", "nearly", "almost",       "circa",
                                               "some",    "close to"};

std::string lower_word_before(std::string_view text, std::size_t pos) {
  std::size_t e = pos;
  while (e > 0 && is_ascii_space(text[e - 1])) --e;
  std::size_t b = e;
  while (b > 0 && is_word_char(text[b - 1])) --b;
  return to_lower(text.substr(b, e - b));
}

bool preceded_by_phrase(std::string_view text, std::size_t pos, std::string_view phrase) {
  std::size_t e = pos;
  while (e > 0 && is_ascii_space(text[e - 1])) --e;
  if (e < phrase.size()) return false;
  const std::size_t b = e - phrase.size();
  if (to_lower(text.substr(b, phrase.size())) != phrase) return false;
  return b == 0 || !is_word_char(text[b - 1]);
}

}  // namespace

std::vector<ClaimNumber> find_numbers(std::string_view s) {
  std::vector<ClaimNumber> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t start = i;
    std::size_t p = i;
    bool negative = false;
    std::string currency_prefix;
    if (s[p] == '-' && p + 1 < s.size() && (is_ascii_digit(s[p + 1]) || s[p + 1] == '$') &&
        (p == 0 || is_ascii_space(s[p - 1]) || s[p - 1] == '(')) {
      negative = true;
      ++p;
    }
    if (s.substr(p).starts_with("$") || s.substr(p).starts_with("\xE2\x82\xAC") ||
        s.substr(p).starts_with("\xC2\xA3")) {
      const std::size_t len = s[p] == '$' ? 1 : (s.substr(p).starts_with("\xE2\x82\xAC") ? 3 : 2);
      currency_prefix = std::string(s.substr(p, len));
      p += len;
    }
    const bool starts_number =
        p < s.size() && (is_ascii_digit(s[p]) ||
                         (s[p] == '.' && p + 1 < s.size() && is_ascii_digit(s[p + 1])));
    const bool at_boundary = start == 0 || !is_word_char(s[start - 1]);
    if (!starts_number || !at_boundary) {
      ++i;
      continue;
    }

    // Core: digits, grouping commas followed by exactly three digits, one point.
    std::size_t q = p;
    std::string core;
    bool seen_point = false;
    int decimals = 0;
    while (q < s.size()) {
      const char ch = s[q];
      if (is_ascii_digit(ch)) {
        core.push_back(ch);
        if (seen_point) ++decimals;
        ++q;
      } else if (ch == ',' && !seen_point && q + 3 < s.size() && is_ascii_digit(s[q + 1]) &&
                 is_ascii_digit(s[q + 2]) && is_ascii_digit(s[q + 3]) &&
                 (q + 4 >= s.size() || !is_ascii_digit(s[q + 4]))) {
        q += 1;
      } else if (ch == '.' && !seen_point && q + 1 < s.size() && is_ascii_digit(s[q + 1])) {
        core.push_back('.');
        seen_point = true;
        ++q;
      } else {
        break;
      }
    }
    // Glued to letters ("3D", "Q4"): not a quantity.
    if (q < s.size() && is_ascii_alpha(s[q])) {
      const std::string_view tail = s.substr(q);
      auto glued_suffix = [&](std::string_view suf) {
        return tail.size() >= suf.size() && to_lower(tail.substr(0, suf.size())) == suf &&
               (tail.size() == suf.size() || !is_ascii_alpha(tail[suf.size()]));
      };
      std::string unit_text;
      if (glued_suffix("k")) unit_text = "k";
      else if (glued_suffix("bn")) unit_text = "bn";
      else if (glued_suffix("mn")) unit_text = "mn";
      else if (tail.size() >= 1 && tail[0] == 'M' && (tail.size() == 1 || !is_ascii_alpha(tail[1])))
        unit_text = "m";
      else if (tail.size() >= 1 && tail[0] == 'B' && (tail.size() == 1 || !is_ascii_alpha(tail[1])))
        unit_text = "b";
      if (unit_text.empty()) {
        i = q;
        while (i < s.size() && is_word_char(s[i])) ++i;
        continue;
      }
      q += unit_text == "bn" || unit_text == "mn" ? 2 : 1;
      core += unit_text;
    } else if (q < s.size() && s[q] == '%') {
      core.push_back('%');
      ++q;
    } else {
      // Separate unit word.
      std::size_t w = q;
      while (w < s.size() && s[w] == ' ') ++w;
      if (w > q) {
        const std::string rest = to_lower(s.substr(w, 16));
        for (const auto& uw : kUnitWords) {
          if (rest.starts_with(uw.text) &&
              (rest.size() == uw.text.size() || !is_ascii_alpha(rest[uw.text.size()]))) {
            core += " ";
            core += uw.text;
            q = w + uw.text.size();
            break;
          }
        }
      }
    }

    ClaimNumber n;
    const std::string literal = (negative ? "-" : "") + currency_prefix + core;
    auto normalized = normalize_number(literal);
    if (!normalized) {
      i = q > i ? q : i + 1;
      continue;
    }
    n.text = std::string(s.substr(start, q - start));
    n.value = normalized->value;
    n.unit = normalized->unit;
    n.decimals = decimals;
    n.begin = start;
    n.end = q;
    // "percentage point(s)" turns a percent-free number into points.
    {
      std::size_t w = q;
      while (w < s.size() && s[w] == ' ') ++w;
      const std::string rest = to_lower(s.substr(w, 18));
      if (rest.starts_with("percentage point")) {
        n.unit = Unit::percent;
        n.percentage_points = true;
        n.end = w + std::string_view("percentage point").size();
        if (n.end < s.size() && s[n.end] == 's') ++n.end;
        q = n.end;
      }
    }
    for (auto approx : kApproximators) {
      if (preceded_by_phrase(s, start, approx)) {
        n.approximate = true;
        break;
      }
    }
    out.push_back(std::move(n));
    i = q;
  }
  return out;
}

namespace {

int effective_places(const ClaimNumber& claimed) { return std::min(claimed.decimals, 2); }

Decimal in_claim_unit(const Decimal& base, Unit unit) {
  return base.scaled_pow10(-unit_pow10(unit));
}

bool ratio_matches(const ClaimNumber& claimed, const Decimal& numerator,
                   const Decimal& denominator) {
  auto q = divide_rounded(in_claim_unit(numerator, claimed.unit), denominator,
                          effective_places(claimed));
  return q && *q == in_claim_unit(claimed.value, claimed.unit);
}

}  // namespace

bool number_matches(const ClaimNumber& claimed, const Decimal& table_value) {
  const Decimal x = in_claim_unit(table_value, claimed.unit).rounded(effective_places(claimed));
  return x == in_claim_unit(claimed.value, claimed.unit);
}

namespace {

// ---------------------------------------------------------------------------
// Entity mentions

enum class MentionKind { row, column };

struct Mention {
  MentionKind kind;
  std::size_t index;        // row or column index
  std::size_t namer_col;    // for rows: column of the cell that named it
  std::size_t begin;        // byte offsets in the sentence
  std::size_t end;
};

struct Analysis {
  std::vector<Word> words;
  std::vector<ClaimNumber> values;
  std::vector<Mention> mentions;
};

bool word_inside_numbers(const Word& w, const std::vector<ClaimNumber>& numbers) {
  for (const auto& n : numbers) {
    if (w.begin >= n.begin && w.begin < n.end) return true;
  }
  return false;
}

std::vector<std::string> norm_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& w : words_of(text)) out.push_back(std::move(w.norm));
  return out;
}

bool all_stopwords(const std::vector<std::string>& toks) {
  return std::all_of(toks.begin(), toks.end(),
                     [](const std::string& t) { return stopwords().contains(t); });
}

constexpr std::string_view kEntityNumberPrepositions[] = {"in",    "from",   "to",  "between",
                                                          "since", "until",  "and", "during",
                                                          "year",  "through"};

Analysis analyze(std::string_view sentence, const Table& table) {
  Analysis a;
  a.words = words_of(sentence);
  std::vector<ClaimNumber> numbers = find_numbers(sentence);

  // Integers introduced by a preposition that equal a first-column cell name
  // that row ("in 2019", "from 2010 to 2020").
  for (const auto& n : numbers) {
    bool is_entity = false;
    if (n.unit == Unit::none && n.value.is_integer() && n.decimals == 0 && table.num_columns() > 0) {
      const std::string before = lower_word_before(sentence, n.begin);
      const bool prep = std::find(std::begin(kEntityNumberPrepositions),
                                  std::end(kEntityNumberPrepositions),
                                  before) != std::end(kEntityNumberPrepositions);
      if (prep) {
        for (std::size_t r = 0; r < table.num_rows(); ++r) {
          const auto& cell = table.rows[r][0];
          if (cell.is_numeric() && cell.numeric()->unit == Unit::none &&
              cell.numeric()->value == n.value) {
            a.mentions.push_back({MentionKind::row, r, 0, n.begin, n.end});
            is_entity = true;
          }
        }
      }
    }
    if (!is_entity) a.values.push_back(n);
  }

  std::vector<Word> free_words;
  for (const auto& w : a.words) {
    if (!word_inside_numbers(w, numbers)) free_words.push_back(w);
  }

  struct Candidate {
    std::size_t first_word;
    std::size_t length;
    Mention mention;
  };
  std::vector<Candidate> candidates;
  auto add_matches = [&](const std::string& text, MentionKind kind, std::size_t index,
                         std::size_t namer_col) {
    const auto toks = norm_tokens(text);
    if (toks.empty() || all_stopwords(toks) || toks.size() > free_words.size()) return;
    for (std::size_t s = 0; s + toks.size() <= free_words.size(); ++s) {
      bool ok = true;
      for (std::size_t k = 0; k < toks.size() && ok; ++k) ok = free_words[s + k].norm == toks[k];
      if (!ok) continue;
      // Matched words must be contiguous in the sentence (no number between).
      candidates.push_back(
          {s, toks.size(),
           {kind, index, namer_col, free_words[s].begin, free_words[s + toks.size() - 1].end}});
    }
  };
  for (std::size_t c = 0; c < table.num_columns(); ++c)
    add_matches(table.headers[c], MentionKind::column, c, 0);
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      const auto& cell = table.rows[r][c];
      if (!cell.is_numeric()) add_matches(cell.raw(), MentionKind::row, r, c);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.length != y.length) return x.length > y.length;
    return x.first_word < y.first_word;
  });
  std::vector<std::pair<std::size_t, std::size_t>> taken;  // word spans accepted
  for (const auto& cand : candidates) {
    const std::size_t b = cand.first_word;
    const std::size_t e = b + cand.length;
    bool conflict = false;
    bool same_span = false;
    for (auto [tb, te] : taken) {
      if (tb == b && te == e) {
        same_span = true;
      } else if (b < te && tb < e) {
        conflict = true;
      }
    }
    if (conflict) continue;
    if (!same_span) taken.emplace_back(b, e);
    a.mentions.push_back(cand.mention);
  }
  std::stable_sort(a.mentions.begin(), a.mentions.end(),
                   [](const Mention& x, const Mention& y) { return x.begin < y.begin; });
  return a;
}

// ---------------------------------------------------------------------------
// Scopes

struct Scope {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  std::set<std::pair<std::size_t, std::size_t>> namers;
};

void add_unique(std::vector<std::size_t>& v, std::size_t x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

Scope scope_of(const std::vector<Mention>& mentions) {
  Scope s;
  for (const auto& m : mentions) {
    if (m.kind == MentionKind::row) {
      add_unique(s.rows, m.index);
      s.namers.insert({m.index, m.namer_col});
    } else {
      add_unique(s.cols, m.index);
    }
  }
  return s;
}

// Rows/columns from `local` when it names any, otherwise from `global`.
Scope layered_scope(const std::vector<Mention>& local, const std::vector<Mention>& global) {
  Scope l = scope_of(local);
  Scope g = scope_of(global);
  Scope s;
  s.rows = l.rows.empty() ? g.rows : l.rows;
  s.cols = l.cols.empty() ? g.cols : l.cols;
  s.namers = g.namers;
  return s;
}

std::vector<CellRef> cells_in(const Scope& s, const Table& table) {
  std::vector<CellRef> out;
  auto numeric = [&](std::size_t r, std::size_t c) {
    return c < table.rows[r].size() && table.rows[r][c].is_numeric();
  };
  if (!s.rows.empty() && !s.cols.empty()) {
    for (auto r : s.rows)
      for (auto c : s.cols)
        if (numeric(r, c)) out.push_back({r, c});
  } else if (!s.rows.empty()) {
    for (auto r : s.rows)
      for (std::size_t c = 0; c < table.num_columns(); ++c)
        if (numeric(r, c) && !s.namers.contains({r, c})) out.push_back({r, c});
  } else if (!s.cols.empty()) {
    for (std::size_t r = 0; r < table.num_rows(); ++r)
      for (auto c : s.cols)
        if (numeric(r, c)) out.push_back({r, c});
  } else {
    for (std::size_t r = 0; r < table.num_rows(); ++r)
      for (std::size_t c = 0; c < table.num_columns(); ++c)
        if (numeric(r, c)) out.push_back({r, c});
  }
  return out;
}

const Decimal& value_at(const Table& table, CellRef ref) {
  return table.rows[ref.row][ref.column].numeric()->value;
}

std::vector<Mention> mentions_between(const std::vector<Mention>& all, std::size_t b,
                                      std::size_t e) {
  std::vector<Mention> out;
  for (const auto& m : all)
    if (m.begin >= b && m.end <= e) out.push_back(m);
  return out;
}

std::vector<ClaimNumber> values_between(const std::vector<ClaimNumber>& all, std::size_t b,
                                        std::size_t e) {
  std::vector<ClaimNumber> out;
  for (const auto& n : all)
    if (n.begin >= b && n.end <= e) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------
// Keywords

bool in_list(const std::string& w, std::initializer_list<std::string_view> list) {
  return std::find(list.begin(), list.end(), w) != list.end();
}

// Index of the first word in `list`, or npos.
std::size_t find_word(const std::vector<Word>& words,
                      std::initializer_list<std::string_view> list, std::size_t from = 0) {
  for (std::size_t i = from; i < words.size(); ++i)
    if (in_list(words[i].norm, list)) return i;
  return std::string::npos;
}

const std::initializer_list<std::string_view> kHigher = {"higher", "greater", "larger", "more",
                                                         "bigger", "above"};
const std::initializer_list<std::string_view> kLower = {"lower", "less", "smaller", "fewer",
                                                        "below"};
const std::initializer_list<std::string_view> kIncrease = {"increased", "increase", "rose",
                                                           "risen",     "grew",     "grown",
                                                           "gained",    "climbed",  "jumped"};
const std::initializer_list<std::string_view> kDecrease = {"decreased", "decrease", "fell",
                                                           "fallen",    "dropped",  "declined",
                                                           "decline",   "shrank",   "slipped"};
const std::initializer_list<std::string_view> kMax = {"highest", "maximum", "largest", "biggest",
                                                      "greatest", "max", "peak", "peaked"};
const std::initializer_list<std::string_view> kMin = {"lowest", "minimum", "smallest", "min",
                                                      "least"};
const std::initializer_list<std::string_view> kMean = {"average", "mean"};
const std::initializer_list<std::string_view> kSum = {"total", "sum", "combined", "altogether"};

// ---------------------------------------------------------------------------
// Claim handlers. Each returns nullopt when the sentence does not fit the form.

using Verdict = std::optional<ClaimParse>;

Verdict check_point(const Analysis& a, const Table& table) {
  if (a.values.empty()) return std::nullopt;
  ClaimParse p;
  p.kind = ClaimKind::point;
  if (a.mentions.empty()) {
    const auto all = cells_in(Scope{}, table);
    if (all.size() != 1) return std::nullopt;
  }
  bool all_ok = true;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const auto& v = a.values[i];
    const std::size_t prev_end = i == 0 ? 0 : a.values[i - 1].end;
    const std::size_t next_begin = i + 1 < a.values.size() ? a.values[i + 1].begin : std::string::npos;
    const auto before = mentions_between(a.mentions, prev_end, v.begin);
    const auto after = mentions_between(a.mentions, v.end, next_begin);
    std::vector<CellRef> candidates = cells_in(layered_scope(before, a.mentions), table);
    for (const auto& c : cells_in(layered_scope(after, a.mentions), table))
      if (std::find(candidates.begin(), candidates.end(), c) == candidates.end())
        candidates.push_back(c);
    bool ok = false;
    for (const auto& c : candidates) {
      if (number_matches(v, value_at(table, c))) {
        ok = true;
        p.cells.push_back(c);
        break;
      }
    }
    if (!ok && !candidates.empty()) p.cells.push_back(candidates.front());
    p.numbers.push_back(v);
    all_ok = all_ok && ok;
  }
  p.verified = all_ok;
  p.note = all_ok ? "all stated values found in scope" : "a stated value is not in its scope";
  return p;
}

Verdict check_comparison(const Analysis& a, const Table& table, std::string_view sentence) {
  std::size_t comp = std::string::npos;
  bool higher = true;
  std::size_t than = std::string::npos;
  for (std::size_t i = 0; i < a.words.size(); ++i) {
    const bool h = in_list(a.words[i].norm, kHigher);
    const bool l = in_list(a.words[i].norm, kLower);
    if (!h && !l) continue;
    const std::size_t t = find_word(a.words, {"than"}, i + 1);
    if (t == std::string::npos) continue;
    comp = i;
    higher = h;
    than = t;
    break;
  }
  if (comp == std::string::npos) return std::nullopt;

  const std::size_t comp_b = a.words[comp].begin;
  const std::size_t comp_e = a.words[comp].end;
  const std::size_t than_b = a.words[than].begin;
  const std::size_t than_e = a.words[than].end;

  std::size_t left_b = comp_e;
  std::size_t left_e = than_b;
  auto left = mentions_between(a.mentions, left_b, left_e);
  if (left.empty()) {
    left_b = 0;
    left_e = comp_b;
    left = mentions_between(a.mentions, left_b, left_e);
  }
  const std::size_t right_b = than_e;
  const std::size_t right_e = sentence.size();
  const auto right = mentions_between(a.mentions, right_b, right_e);

  std::vector<Mention> context;
  for (const auto& m : a.mentions) {
    const bool in_left = m.begin >= left_b && m.end <= left_e;
    const bool in_right = m.begin >= right_b && m.end <= right_e;
    if (!in_left && !in_right) context.push_back(m);
  }

  ClaimParse p;
  p.kind = ClaimKind::comparison;

  auto side_cell = [&](const std::vector<Mention>& side) -> std::optional<CellRef> {
    if (side.empty()) return std::nullopt;
    Scope s = layered_scope(side, context);
    if (s.rows.empty() && s.cols.empty()) return std::nullopt;
    const auto cells = cells_in(s, table);
    if (cells.size() != 1) return std::nullopt;
    return cells.front();
  };

  const auto lcell = side_cell(left);
  if (!lcell) return std::nullopt;
  const Decimal lv = value_at(table, *lcell);
  p.cells.push_back(*lcell);

  bool ok = true;
  for (const auto& n : values_between(a.values, left_b, left_e)) {
    p.numbers.push_back(n);
    ok = ok && number_matches(n, lv);
  }

  Decimal rv;
  const auto right_values = values_between(a.values, right_b, right_e);
  if (const auto rcell = side_cell(right)) {
    rv = value_at(table, *rcell);
    p.cells.push_back(*rcell);
    for (const auto& n : right_values) {
      p.numbers.push_back(n);
      ok = ok && number_matches(n, rv);
    }
  } else if (right.empty() && !right_values.empty()) {
    // "more than 50%": compare against the literal.
    rv = right_values.front().value;
    p.numbers.push_back(right_values.front());
  } else {
    return std::nullopt;
  }
  const bool order_ok = higher ? lv > rv : lv < rv;
  p.verified = ok && order_ok;
  p.note = !order_ok ? "comparison direction contradicted"
                     : (ok ? "comparison holds" : "a stated value does not match");
  return p;
}

Verdict check_extremum_or_aggregate(const Analysis& a, const Table& table) {
  const bool is_max = find_word(a.words, kMax) != std::string::npos;
  const bool is_min = find_word(a.words, kMin) != std::string::npos;
  const bool is_mean = find_word(a.words, kMean) != std::string::npos;
  const bool is_sum = find_word(a.words, kSum) != std::string::npos;
  if (!is_max && !is_min && !is_mean && !is_sum) return std::nullopt;
  if (a.values.empty()) return std::nullopt;

  const auto cells = cells_in(scope_of(a.mentions), table);
  if (cells.empty()) return std::nullopt;
  const ClaimNumber& claimed = a.values.front();

  ClaimParse p;
  p.cells = cells;
  p.numbers.push_back(claimed);
  Decimal sum;
  for (const auto& c : cells) sum = sum + value_at(table, c);

  if (is_mean || is_sum) {
    p.kind = ClaimKind::aggregate;
    if (is_mean) {
      const Decimal n = Decimal::from_int(static_cast<std::int64_t>(cells.size()));
      p.computed = divide_rounded(sum, n, 12);
      p.verified = ratio_matches(claimed, sum, n);
      p.note = "average over " + std::to_string(cells.size()) + " cells";
    } else {
      p.computed = sum;
      p.verified = number_matches(claimed, sum);
      p.note = "sum over " + std::to_string(cells.size()) + " cells";
    }
    return p;
  }
  p.kind = ClaimKind::extremum;
  Decimal best = value_at(table, cells.front());
  for (const auto& c : cells) {
    const Decimal& v = value_at(table, c);
    if (is_max ? v > best : v < best) best = v;
  }
  p.computed = best;
  p.verified = number_matches(claimed, best);
  p.note = std::string(is_max ? "maximum" : "minimum") + " over " + std::to_string(cells.size()) +
           " cells";
  return p;
}

Verdict check_delta(const Analysis& a, const Table& table) {
  const std::size_t inc = find_word(a.words, kIncrease);
  const std::size_t dec = find_word(a.words, kDecrease);
  if (inc == std::string::npos && dec == std::string::npos) return std::nullopt;
  const bool increase = inc != std::string::npos && (dec == std::string::npos || inc < dec);
  const std::size_t verb = increase ? inc : dec;
  const std::size_t by = find_word(a.words, {"by"}, verb + 1);
  if (by == std::string::npos) return std::nullopt;
  const ClaimNumber* amount = nullptr;
  for (const auto& v : a.values) {
    if (v.begin >= a.words[by].end) {
      amount = &v;
      break;
    }
  }
  if (!amount) return std::nullopt;

  Scope s = scope_of(a.mentions);
  std::optional<CellRef> from;
  std::optional<CellRef> to;
  auto numeric = [&](std::size_t r, std::size_t c) {
    return r < table.num_rows() && c < table.rows[r].size() && table.rows[r][c].is_numeric();
  };
  auto value_column_for_rows = [&](std::size_t r1, std::size_t r2) -> std::optional<std::size_t> {
    if (s.cols.size() == 1) return s.cols.front();
    std::vector<std::size_t> options;
    for (std::size_t c = 0; c < table.num_columns(); ++c) {
      if (s.namers.contains({r1, c}) || s.namers.contains({r2, c})) continue;
      if (numeric(r1, c) && numeric(r2, c)) options.push_back(c);
    }
    if (options.size() == 1) return options.front();
    return std::nullopt;
  };
  if (s.rows.size() >= 2) {
    if (auto c = value_column_for_rows(s.rows[0], s.rows[1])) {
      from = CellRef{s.rows[0], *c};
      to = CellRef{s.rows[1], *c};
    }
  } else if (s.cols.size() >= 2) {
    std::optional<std::size_t> row;
    if (s.rows.size() == 1) row = s.rows.front();
    else if (table.num_rows() == 1) row = 0;
    if (row) {
      from = CellRef{*row, s.cols[0]};
      to = CellRef{*row, s.cols[1]};
    }
  } else if (table.num_rows() >= 2) {
    // Series: first to last row of the single value column.
    std::optional<std::size_t> col;
    if (s.cols.size() == 1) {
      col = s.cols.front();
    } else {
      std::vector<std::size_t> options;
      for (std::size_t c = 0; c < table.num_columns(); ++c) {
        bool all = true;
        for (std::size_t r = 0; r < table.num_rows() && all; ++r) all = numeric(r, c);
        if (all) options.push_back(c);
      }
      if (options.size() == 2 && options.front() == 0) options.erase(options.begin());
      if (options.size() == 1) col = options.front();
    }
    if (col) {
      from = CellRef{0, *col};
      to = CellRef{table.num_rows() - 1, *col};
    }
  }
  if (!from || !to || !numeric(from->row, from->column) || !numeric(to->row, to->column))
    return std::nullopt;

  ClaimParse p;
  p.kind = ClaimKind::delta;
  p.cells = {*from, *to};
  p.numbers.push_back(*amount);
  const Decimal start = value_at(table, *from);
  const Decimal end = value_at(table, *to);
  const Decimal change = end - start;
  p.computed = change;
  const bool direction_ok = increase ? change > Decimal() : change < Decimal();

  const bool start_is_percent = table.rows[from->row][from->column].numeric()->unit == Unit::percent;
  bool magnitude_ok = false;
  if (amount->unit == Unit::percent) {
    const bool points = amount->percentage_points;
    if (points || start_is_percent) magnitude_ok = number_matches(*amount, change.abs());
    if (!points && !magnitude_ok && !start.is_zero())
      magnitude_ok = ratio_matches(*amount, change.abs() * 100, start.abs());
  } else {
    magnitude_ok = number_matches(*amount, change.abs());
  }
  p.verified = direction_ok && magnitude_ok;
  p.note = !direction_ok ? "change direction contradicted"
                         : (magnitude_ok ? "change matches" : "change magnitude does not match");
  return p;
}

}  // namespace

OracleResult oracle_check(std::string_view sentence, const Table& table, OracleMode mode) {
  const Analysis a = analyze(sentence, table);
  Verdict v;
  if (!v) v = check_delta(a, table);
  if (!v) v = check_comparison(a, table, sentence);
  if (!v) v = check_extremum_or_aggregate(a, table);
  if (!v) v = check_point(a, table);

  OracleResult result;
  if (!v) {
    result.parse.kind = ClaimKind::unparsed;
    result.parse.note = "sentence is outside the claim grammar";
    result.score = mode == OracleMode::permissive ? 1.0 : 0.0;
    return result;
  }
  result.parse = std::move(*v);
  result.score = result.parse.verified ? 1.0 : 0.0;
  return result;
}

}  // namespace chats
