#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chats/decimal.hpp"

namespace chats {

enum class Unit { none, percent, thousand, million, billion, currency };

std::string_view to_string(Unit unit);

// Power of ten a value written in `unit` is multiplied by to reach base units.
int unit_pow10(Unit unit);

// A number recognized in free text or a table cell, expressed in base units:
// "2.51k" is {2510, thousand}, "45.3%" is {45.3, percent}.
struct NumericValue {
  Decimal value;
  Unit unit = Unit::none;
  std::string currency;  // symbol or ISO code, empty when absent

  friend bool operator==(const NumericValue&, const NumericValue&) = default;
};

// Recognizes "1,234.5", "45.3%", "2.51k", "3 million", "$12.4", "-7",
// "12 percent", "3.2bn". Returns nullopt for anything else.
std::optional<NumericValue> normalize_number(std::string_view raw);

// Canonical text for a normalized value; normalize_number(render(v)) == v.
std::string render_number(const NumericValue& v);

class Cell {
 public:
  Cell() = default;
  explicit Cell(std::string raw);

  const std::string& raw() const { return raw_; }
  const std::optional<NumericValue>& numeric() const { return numeric_; }
  bool is_numeric() const { return numeric_.has_value(); }

  // Numeric data is derived from raw, so raw equality is cell equality.
  friend bool operator==(const Cell& a, const Cell& b) { return a.raw_ == b.raw_; }

 private:
  std::string raw_;
  std::optional<NumericValue> numeric_;
};

enum class TableSource { gold, derendered };

std::string_view to_string(TableSource source);
std::optional<TableSource> table_source_from_string(std::string_view s);

struct Table {
  std::string title;
  std::vector<std::string> headers;
  std::vector<std::vector<Cell>> rows;
  TableSource source = TableSource::derendered;

  std::size_t num_columns() const { return headers.size(); }
  std::size_t num_rows() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  // Structure only; source is provenance, not content.
  friend bool operator==(const Table& a, const Table& b) {
    return a.title == b.title && a.headers == b.headers && a.rows == b.rows;
  }
};

enum class TableFormat { linearized, tsv };

struct ParseResult {
  Table table;
  std::vector<std::string> warnings;
};

// Grammar (linearized):
//   [title-line NL] header-line NL {row-line NL}
//   title-line := "title" SEP text      (case-insensitive keyword)
//   SEP        := "|" (surrounding spaces are trimmed from every cell)
// Cell escapes: "\|" "\\" "\n" "\t". Blank lines are ignored. Ragged rows are
// padded (short) or truncated (long) with a warning.
//
// Throws EmptyInput when there are no non-blank lines and MalformedTitle when
// the title line has more than two segments.
ParseResult parse_table(std::string_view text, TableFormat format = TableFormat::linearized,
                        TableSource source = TableSource::derendered);

inline ParseResult parse_linearized(std::string_view text,
                                    TableSource source = TableSource::derendered) {
  return parse_table(text, TableFormat::linearized, source);
}

std::string serialize(const Table& table, TableFormat format = TableFormat::linearized);

// Checks rectangularity and header sanity; returns the list of violations.
std::vector<std::string> validate(const Table& table);

}  // namespace chats
