#include <doctest.h>

#include <random>

#include "chats/errors.hpp"
#include "chats/table.hpp"

using namespace chats;

namespace {

std::string random_cell(std::mt19937_64& rng) {
  static const std::string alphabet = "ab Z09.,%|\\\t\n-$k";
  std::uniform_int_distribution<int> len(1, 8), pick(0, static_cast<int>(alphabet.size()) - 1);
  std::string s;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) s += alphabet[static_cast<std::size_t>(pick(rng))];
  // Cells are trimmed on parse, so canonical cells carry no edge spaces, and
  // blank headers are renamed.
  while (!s.empty() && s.front() == ' ') s.erase(0, 1);
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s.find_first_not_of(" \t\n") == std::string::npos ? "x" : s;
}

Table random_table(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cols(1, 5), rows(0, 6), coin(0, 1);
  Table t;
  if (coin(rng)) t.title = random_cell(rng);
  const int c = cols(rng);
  for (int i = 0; i < c; ++i) t.headers.push_back(random_cell(rng));
  const int r = rows(rng);
  for (int i = 0; i < r; ++i) {
    std::vector<Cell> row;
    for (int j = 0; j < c; ++j) row.emplace_back(random_cell(rng));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Accepts digits with "," separators and at most one '.'; nothing else.
std::optional<long double> digit_filter(const std::string& s) {
  std::string digits;
  for (char ch : s) {
    if (ch == ',') continue;
    if ((ch < '0' || ch > '9') && ch != '.') return std::nullopt;
    digits += ch;
  }
  if (digits.empty()) return std::nullopt;
  return std::stold(digits);
}

}  // namespace

TEST_CASE("parse_linearized examples") {
  auto r = parse_linearized("title | Access to water\nservice | urban | rural\nwater | 95 | 62");
  CHECK(r.table.title == "Access to water");
  CHECK(r.table.headers == std::vector<std::string>{"service", "urban", "rural"});
  REQUIRE(r.table.num_rows() == 1);
  CHECK(r.table.rows[0][1].numeric()->value == Decimal::from_int(95));
  CHECK(r.warnings.empty());

  r = parse_linearized("a | b\n1 | 2");
  CHECK(r.table.title.empty());
  CHECK(r.table.headers.size() == 2);
  CHECK(r.table.rows.size() == 1);

  r = parse_linearized("title | X\ncol\n");
  CHECK(r.table.headers == std::vector<std::string>{"col"});
  CHECK(r.table.rows.empty());
  CHECK(r.warnings.empty());
}

TEST_CASE("parse errors and ragged rows") {
  CHECK_THROWS_AS(parse_linearized(""), EmptyInput);
  CHECK_THROWS_AS(parse_linearized("\n  \n"), EmptyInput);
  CHECK_THROWS_AS(parse_linearized("title | a | b\nx"), MalformedTitle);
  auto r = parse_linearized("a | b | c\n1\n1 | 2 | 3 | 4");
  CHECK(r.warnings.size() == 2);
  for (const auto& row : r.table.rows) CHECK(row.size() == 3);
  CHECK(validate(r.table).empty());
}

TEST_CASE("escaping of pipes and backslashes") {
  Table t;
  t.headers = {"a|b", "c\\d"};
  t.rows = {{Cell("x|y"), Cell("tab\there")}};
  const std::string text = serialize(t);
  CHECK(text.find("a\\|b") != std::string::npos);
  CHECK(parse_linearized(text).table == t);
}

TEST_CASE("serialize(parse(x)) on a fuzz corpus of canonical texts") {
  std::mt19937_64 rng(50);
  for (int i = 0; i < 50; ++i) {
    const std::string canonical = serialize(random_table(rng));
    const std::string with_blank = canonical + "\n\n";
    CHECK(serialize(parse_linearized(canonical).table) == canonical);
    CHECK(serialize(parse_linearized(with_blank).table) == canonical);
  }
}

TEST_CASE("parse(serialize(t)) == t for random tables") {
  std::mt19937_64 rng(200);
  for (int i = 0; i < 200; ++i) {
    const Table t = random_table(rng);
    CHECK(parse_linearized(serialize(t)).table == t);
    CHECK(parse_table(serialize(t, TableFormat::tsv), TableFormat::tsv).table == t);
  }
}

TEST_CASE("normalize_number forms") {
  auto v = normalize_number("2.51k");
  REQUIRE(v);
  CHECK(v->value == Decimal::from_int(2510));
  CHECK(v->unit == Unit::thousand);
  v = normalize_number("45.3%");
  CHECK(v->value == *Decimal::parse("45.3"));
  CHECK(v->unit == Unit::percent);
  v = normalize_number("1,234.5");
  CHECK(v->value == *Decimal::parse("1234.5"));
  v = normalize_number("3 million");
  CHECK(v->value == Decimal::from_int(3000000));
  CHECK(v->unit == Unit::million);
  v = normalize_number("$12.4");
  CHECK(v->value == *Decimal::parse("12.4"));
  CHECK(v->currency == "USD");
  CHECK(v->unit == Unit::currency);
  CHECK_FALSE(normalize_number("water"));
  CHECK_FALSE(normalize_number(""));
}

TEST_CASE("normalize_number agrees with a digit-filter parser") {
  std::mt19937_64 rng(100);
  std::uniform_int_distribution<long> whole(0, 99999999);
  std::uniform_int_distribution<int> frac(0, 99), coin(0, 1);
  for (int i = 0; i < 100; ++i) {
    const long w = whole(rng);
    std::string digits = std::to_string(w);
    if (coin(rng))
      for (int at = static_cast<int>(digits.size()) - 3; at > 0; at -= 3)
        digits.insert(static_cast<std::size_t>(at), ",");
    if (coin(rng)) digits += "." + std::to_string(frac(rng));
    const auto expect = digit_filter(digits);
    const auto got = normalize_number(digits);
    REQUIRE(got);
    REQUIRE(expect);
    CHECK(got->unit == Unit::none);
    CHECK(got->value.to_double() == doctest::Approx(static_cast<double>(*expect)).epsilon(1e-15));
  }
  CHECK(normalize_number("1,234,567")->value == Decimal::from_int(1234567));
}

TEST_CASE("render_number round-trips") {
  for (const char* s : {"2.51k", "45.3%", "3 million", "$12.4", "-7", "3.2bn", "0.5", "12 percent"}) {
    const auto v = normalize_number(s);
    REQUIRE_MESSAGE(v, s);
    CHECK(normalize_number(render_number(*v)) == v);
  }
}

TEST_CASE("table source strings") {
  CHECK(table_source_from_string("gold") == TableSource::gold);
  CHECK(table_source_from_string("derendered") == TableSource::derendered);
  CHECK_FALSE(table_source_from_string("x"));
  CHECK(to_string(TableSource::gold) == "gold");
}
