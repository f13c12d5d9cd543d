#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chats/decimal.hpp"
#include "chats/table.hpp"

namespace chats {

// A number as written in a claim. `value` is in base units; `decimals` counts
// digits after the point in the written form ("2.51k" has 2).
struct ClaimNumber {
  std::string text;
  Decimal value;
  Unit unit = Unit::none;
  int decimals = 0;
  bool approximate = false;  // preceded by around/about/approximately/...
  bool percentage_points = false;
  std::size_t begin = 0;     // byte offsets in the sentence
  std::size_t end = 0;
};

// Numbers found in free text, in order of appearance.
std::vector<ClaimNumber> find_numbers(std::string_view sentence);

// Tolerance policy: a claimed number matches a table value x iff x expressed
// in the claim's unit, rounded to min(decimals as written, 2) places, equals
// the claimed value.
bool number_matches(const ClaimNumber& claimed, const Decimal& table_value);

enum class ClaimKind { unparsed, point, comparison, extremum, aggregate, delta };

std::string_view to_string(ClaimKind kind);

struct CellRef {
  std::size_t row = 0;
  std::size_t column = 0;
  friend bool operator==(const CellRef&, const CellRef&) = default;
};

struct ClaimParse {
  ClaimKind kind = ClaimKind::unparsed;
  std::vector<CellRef> cells;         // table cells the claim was checked against
  std::vector<ClaimNumber> numbers;   // claimed numbers that were checked
  std::optional<Decimal> computed;    // aggregate / extremum / delta value
  bool verified = false;
  std::string note;
};

enum class OracleMode { strict, permissive };

// Deterministic table-entailment checker over a controlled claim grammar
// (docs/claim_grammar.ebnf). Returns 1.0 for a verified claim, 0.0 for a
// contradicted one, and 0.0 (strict) or 1.0 (permissive) when the sentence is
// outside the grammar.
struct OracleResult {
  double score = 0.0;
  ClaimParse parse;
};

OracleResult oracle_check(std::string_view sentence, const Table& table,
                          OracleMode mode = OracleMode::strict);

}  // namespace chats
