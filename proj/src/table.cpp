#include "chats/table.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "chats/errors.hpp"
#include "chats/text.hpp"

namespace chats {

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::none: return "none";
    case Unit::percent: return "percent";
    case Unit::thousand: return "thousand";
    case Unit::million: return "million";
    case Unit::billion: return "billion";
    case Unit::currency: return "currency";
  }
  return "none";
}

int unit_pow10(Unit unit) {
  switch (unit) {
    case Unit::thousand: return 3;
    case Unit::million: return 6;
    case Unit::billion: return 9;
    default: return 0;
  }
}

std::string_view to_string(TableSource source) {
  return source == TableSource::gold ? "gold" : "derendered";
}

std::optional<TableSource> table_source_from_string(std::string_view s) {
  if (s == "gold") return TableSource::gold;
  if (s == "derendered") return TableSource::derendered;
  return std::nullopt;
}

namespace {

struct CurrencyPrefix {
  std::string_view text;
  std::string_view code;
};

constexpr CurrencyPrefix kCurrencyPrefixes[] = {
    {"US$", "USD"}, {"$", "USD"}, {"\xE2\x82\xAC", "EUR"}, {"\xC2\xA3", "GBP"}, {"\xC2\xA5", "JPY"},
};

struct ScaleSuffix {
  std::string_view text;  // lowercase
  Unit unit;
};

// Longer spellings first so "mn" is not read as "m" + garbage.
constexpr ScaleSuffix kSuffixes[] = {
    {"per cent", Unit::percent}, {"percent", Unit::percent}, {"%", Unit::percent},
    {"thousand", Unit::thousand}, {"k", Unit::thousand},     {"million", Unit::million},
    {"mn", Unit::million},        {"m", Unit::million},      {"billion", Unit::billion},
    {"bn", Unit::billion},        {"b", Unit::billion},
};

const std::regex& number_core() {
  static const std::regex re(R"(^(\d{1,3}(,\d{3})+(\.\d+)?|\d+(\.\d+)?|\.\d+)$)");
  return re;
}

}  // namespace

std::optional<NumericValue> normalize_number(std::string_view raw) {
  std::string s(trim(raw));
  if (s.empty()) return std::nullopt;

  bool negative = false;
  auto take_sign = [&] {
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
      negative = s[0] == '-';
      s.erase(0, 1);
    }
  };
  take_sign();

  std::string currency;
  for (const auto& prefix : kCurrencyPrefixes) {
    if (s.starts_with(prefix.text)) {
      currency = prefix.code;
      s.erase(0, prefix.text.size());
      if (!negative) take_sign();
      break;
    }
  }

  // Split the numeric core from a trailing unit.
  std::size_t end = 0;
  while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == ',' ||
                            s[end] == '.')) {
    ++end;
  }
  std::string core = s.substr(0, end);
  // A trailing period belongs to the surrounding prose, not the number.
  std::string rest = to_lower(trim(std::string_view(s).substr(end)));
  if (core.empty() || !std::regex_match(core, number_core())) return std::nullopt;

  Unit unit = Unit::none;
  if (!rest.empty()) {
    bool matched = false;
    for (const auto& suffix : kSuffixes) {
      if (rest == suffix.text) {
        unit = suffix.unit;
        matched = true;
        break;
      }
    }
    if (!matched) return std::nullopt;
  }
  if (unit == Unit::percent && !currency.empty()) return std::nullopt;

  core.erase(std::remove(core.begin(), core.end(), ','), core.end());
  auto value = Decimal::parse(core);
  if (!value) return std::nullopt;
  Decimal v = value->scaled_pow10(unit_pow10(unit));
  if (negative) v = -v;
  if (!currency.empty() && unit == Unit::none) unit = Unit::currency;
  return NumericValue{v, unit, currency};
}

std::string render_number(const NumericValue& v) {
  std::string body = v.value.abs().scaled_pow10(-unit_pow10(v.unit)).to_string();
  switch (v.unit) {
    case Unit::percent: body += "%"; break;
    case Unit::thousand: body += "k"; break;
    case Unit::million: body += " million"; break;
    case Unit::billion: body += " billion"; break;
    default: break;
  }
  std::string prefix;
  if (!v.currency.empty()) {
    prefix = "US$";
    for (const auto& p : kCurrencyPrefixes) {
      if (p.code == v.currency && p.text != "US$") {
        prefix = p.text;
        break;
      }
    }
    if (v.currency == "USD") prefix = "$";
  }
  return (v.value.is_negative() ? "-" : "") + prefix + body;
}

Cell::Cell(std::string raw) : raw_(std::move(raw)), numeric_(normalize_number(raw_)) {}

namespace {

char separator_for(TableFormat format) { return format == TableFormat::tsv ? '\t' : '|'; }

std::string escape_cell(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    switch (ch) {
      case '\\': out += "\\\\"; break;
      case '|': out += "\\|"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string unescape_cell(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      const char next = text[i + 1];
      switch (next) {
        case '\\': out.push_back('\\'); ++i; continue;
        case '|': out.push_back('|'); ++i; continue;
        case 'n': out.push_back('\n'); ++i; continue;
        case 't': out.push_back('\t'); ++i; continue;
        case 'r': out.push_back('\r'); ++i; continue;
        default: break;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

std::vector<std::string> split_line(std::string_view line, TableFormat format) {
  const char sep = separator_for(format);
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\') {
      ++i;
      continue;
    }
    if (line[i] == sep) {
      cells.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  cells.emplace_back(line.substr(start));
  for (auto& cell : cells) {
    if (format == TableFormat::linearized) cell = std::string(trim(cell));
    cell = unescape_cell(cell);
  }
  return cells;
}

bool is_blank(std::string_view line, TableFormat format) {
  if (format == TableFormat::tsv) return line.empty();
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::string join_cells(const std::vector<std::string>& cells, TableFormat format) {
  const std::string sep = format == TableFormat::tsv ? "\t" : " | ";
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += sep;
    out += escape_cell(cells[i]);
  }
  return out;
}

}  // namespace

ParseResult parse_table(std::string_view text, TableFormat format, TableSource source) {
  std::string normalized(text);
  // De-rendering models often encode line breaks as a literal token.
  for (std::size_t pos; (pos = normalized.find("<0x0A>")) != std::string::npos;)
    normalized.replace(pos, 6, "\n");

  std::vector<std::string> lines;
  for (auto line : split_lines(normalized)) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!is_blank(line, format)) lines.emplace_back(line);
  }
  if (lines.empty()) throw EmptyInput("table text has no non-blank lines");

  ParseResult result;
  Table& table = result.table;
  table.source = source;

  std::size_t next = 0;
  {
    auto first = split_line(lines[0], format);
    if (first.size() >= 2 && to_lower(first[0]) == "title") {
      if (first.size() > 2)
        throw MalformedTitle("title line has " + std::to_string(first.size()) +
                             " segments, expected 2");
      table.title = first[1];
      next = 1;
    }
  }
  if (next < lines.size()) {
    table.headers = split_line(lines[next], format);
    ++next;
    for (std::size_t i = 0; i < table.headers.size(); ++i) {
      if (trim(table.headers[i]).empty()) {
        table.headers[i] = "column_" + std::to_string(i + 1);
        result.warnings.push_back("empty header " + std::to_string(i + 1) + " renamed to " +
                                  table.headers[i]);
      }
    }
  }
  const std::size_t width = table.headers.size();
  for (; next < lines.size(); ++next) {
    auto cells = split_line(lines[next], format);
    const std::size_t row_no = table.rows.size() + 1;
    if (cells.size() < width) {
      result.warnings.push_back("row " + std::to_string(row_no) + " has " +
                                std::to_string(cells.size()) + " cells, padded to " +
                                std::to_string(width));
      cells.resize(width);
    } else if (cells.size() > width) {
      result.warnings.push_back("row " + std::to_string(row_no) + " has " +
                                std::to_string(cells.size()) + " cells, truncated to " +
                                std::to_string(width));
      cells.resize(width);
    }
    std::vector<Cell> row;
    row.reserve(width);
    for (auto& c : cells) row.emplace_back(std::move(c));
    table.rows.push_back(std::move(row));
  }
  return result;
}

std::string serialize(const Table& table, TableFormat format) {
  std::vector<std::string> lines;
  const bool header_looks_like_title =
      !table.headers.empty() && to_lower(trim(table.headers[0])) == "title" &&
      table.headers.size() >= 2;
  if (!table.title.empty() || header_looks_like_title) {
    lines.push_back(join_cells({"title", table.title}, format));
  }
  if (!table.headers.empty()) lines.push_back(join_cells(table.headers, format));
  for (const auto& row : table.rows) {
    std::vector<std::string> raw;
    raw.reserve(row.size());
    for (const auto& cell : row) raw.push_back(cell.raw());
    lines.push_back(join_cells(raw, format));
  }
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

std::vector<std::string> validate(const Table& table) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < table.headers.size(); ++i) {
    if (trim(table.headers[i]).empty())
      problems.push_back("header " + std::to_string(i + 1) + " is empty");
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.headers.size())
      problems.push_back("row " + std::to_string(r + 1) + " has " +
                         std::to_string(table.rows[r].size()) + " cells, expected " +
                         std::to_string(table.headers.size()));
  }
  return problems;
}

}  // namespace chats
