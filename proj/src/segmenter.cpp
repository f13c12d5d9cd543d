#include "chats/segmenter.hpp"

#include <algorithm>
#include <iterator>

#include "chats/text.hpp"

namespace chats {

namespace {

constexpr std::string_view kAbbreviations[] = {
    "u.s.",  "u.k.",  "u.n.",  "e.u.",  "e.g.",  "i.e.",   "vs.",   "fig.",  "figs.",
    "no.",   "nos.",  "vol.",  "mr.",   "mrs.",  "ms.",    "dr.",   "prof.", "inc.",
    "ltd.",  "co.",   "corp.", "jr.",   "sr.",   "st.",    "mt.",   "approx.", "est.",
    "dept.", "govt.", "avg.",  "cf.",   "al.",   "ca.",    "a.m.",  "p.m.",  "jan.",
    "feb.",  "mar.",  "apr.",  "jun.",  "jul.",  "aug.",   "sep.",  "sept.", "oct.",
    "nov.",  "dec.",  "ft.",   "pp.",   "eq.",   "resp.",
};

bool is_terminal(char ch) { return ch == '.' || ch == '!' || ch == '?'; }
bool is_closer(char ch) { return ch == '"' || ch == '\'' || ch == ')' || ch == ']'; }
bool is_opener(char ch) { return ch == '"' || ch == '\'' || ch == '(' || ch == '['; }

// The whitespace-delimited word ending at `dot` (inclusive), lowercased and
// stripped of leading brackets/quotes.
std::string word_ending_at(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_ascii_space(text[b - 1])) --b;
  while (b < dot && is_opener(text[b])) ++b;
  return to_lower(text.substr(b, dot - b + 1));
}

bool is_abbreviation(std::string_view word) {
  return std::find(std::begin(kAbbreviations), std::end(kAbbreviations), word) !=
         std::end(kAbbreviations);
}

// Whether a terminal-punctuation run [start, stop) followed by whitespace ends
// a sentence given what comes after.
bool ends_sentence(std::string_view text, std::size_t start, std::size_t stop) {
  const std::string_view run = text.substr(start, stop - start);
  const auto dots = std::count(run.begin(), run.end(), '.');
  if (dots >= 2) return false;  // ellipsis
  if (run.front() == '.' && is_abbreviation(word_ending_at(text, start))) return false;

  std::size_t k = stop;
  while (k < text.size() && is_ascii_space(text[k])) {
    if (text[k] == '\n') return true;
    ++k;
  }
  if (k >= text.size()) return true;
  while (k < text.size() && is_opener(text[k])) ++k;
  if (k >= text.size()) return false;
  return is_ascii_upper(text[k]) || is_ascii_digit(text[k]);
}

void emit(std::string_view text, std::size_t b, std::size_t e, Summary& out) {
  while (b < e && is_ascii_space(text[b])) ++b;
  while (e > b && is_ascii_space(text[e - 1])) --e;
  if (b == e) return;
  Sentence s;
  s.text = std::string(text.substr(b, e - b));
  s.index = out.sentences.size();
  s.begin = b;
  s.end = e;
  out.sentences.push_back(std::move(s));
}

}  // namespace

std::span<const std::string_view> abbreviations() { return kAbbreviations; }

Summary segment(std::string_view text) {
  Summary out;
  out.text = std::string(text);
  std::size_t sentence_start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (ch == '\n') {
      emit(text, sentence_start, i, out);
      sentence_start = i + 1;
      ++i;
      continue;
    }
    if (is_terminal(ch)) {
      std::size_t stop = i;
      while (stop < text.size() && is_terminal(text[stop])) ++stop;
      while (stop < text.size() && is_closer(text[stop])) ++stop;
      const bool followed_by_space = stop < text.size() && is_ascii_space(text[stop]);
      if (followed_by_space && ends_sentence(text, i, stop)) {
        emit(text, sentence_start, stop, out);
        sentence_start = stop;
      }
      i = stop;
      continue;
    }
    ++i;
  }
  emit(text, sentence_start, text.size(), out);
  return out;
}

Summary join_sentences(const std::vector<std::string>& sentences) {
  Summary out;
  for (const auto& s : sentences) {
    if (!out.text.empty()) out.text += ' ';
    Sentence sentence;
    sentence.text = s;
    sentence.index = out.sentences.size();
    sentence.begin = out.text.size();
    out.text += s;
    sentence.end = out.text.size();
    out.sentences.push_back(std::move(sentence));
  }
  return out;
}

}  // namespace chats
