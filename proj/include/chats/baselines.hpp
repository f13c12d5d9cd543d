#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chats/table.hpp"

namespace chats {

// Lowercased tokens. Splits on whitespace and punctuation (each punctuation
// character becomes its own token) but keeps numbers such as "45.3" and
// "1,234" whole.
std::vector<std::string> tokenize(std::string_view text);

inline constexpr double kBleuEpsilon = 1e-9;

struct BleuStats {
  std::vector<std::size_t> matches;  // clipped, per order
  std::vector<std::size_t> totals;   // candidate n-grams, per order
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;  // closest reference length
};

BleuStats bleu_stats(const std::vector<std::string>& candidate,
                     const std::vector<std::vector<std::string>>& references, int max_order = 4);

// Geometric mean of clipped n-gram precisions with zero match counts replaced
// by kBleuEpsilon, times exp(1 - r/c) when c < r. Orders for which the
// candidate has no n-grams contribute a precision of 1.
double bleu_from_stats(const BleuStats& stats);

// Sentence BLEU. Throws EmptyCandidate when the candidate has no tokens.
double bleu(std::string_view candidate, const std::vector<std::string>& references,
            int max_order = 4);

// Counts summed over the corpus before combining.
double corpus_bleu(const std::vector<std::string>& candidates,
                   const std::vector<std::vector<std::string>>& references, int max_order = 4);

struct ParentScore {
  double precision = 0.0;         // entailed precision
  double reference_recall = 0.0;
  double table_recall = 0.0;
  double recall = 0.0;            // reference_recall^(1-lambda) * table_recall^lambda
  double f = 0.0;
};

// Table tokens: every header and every row cell, tokenized.
std::vector<std::string> table_tokens(const Table& table);

// PARENT, word-overlap entailment. A candidate n-gram is correct if it is in
// the reference (clipped) or every token of it occurs in the table.
ParentScore parent_detail(std::string_view candidate, std::string_view reference,
                          const Table& table, double lambda = 0.5, int max_order = 4);
double parent(std::string_view candidate, std::string_view reference, const Table& table,
              double lambda = 0.5);

}  // namespace chats
