#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chats {

struct Sentence {
  std::string text;
  std::size_t index = 0;
  // Half-open byte offsets into the summary; text == summary.substr(begin, end - begin).
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Summary {
  std::string text;
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

// Rule-based sentence splitter. Boundaries are newlines, and '.', '!' or '?'
// followed by whitespace and an uppercase letter or digit, except after a
// known abbreviation or inside an ellipsis. Sentences are trimmed.
Summary segment(std::string_view summary_text);

// Abbreviations (lowercase, with trailing period) that never end a sentence.
std::span<const std::string_view> abbreviations();

// Builds a Summary from already-split sentences, joined with single spaces.
Summary join_sentences(const std::vector<std::string>& sentences);

}  // namespace chats
