#include <doctest.h>

#include <random>

#include "chats/decimal.hpp"

using chats::Decimal;
using chats::divide_rounded;

TEST_CASE("decimal parses plain literals canonically") {
  CHECK(Decimal::parse("2512.3") == Decimal(25123, -1));
  CHECK(Decimal::parse("2510.00") == Decimal(251, 1));
  CHECK(Decimal::parse("-0.005") == Decimal(-5, -3));
  CHECK(Decimal::parse(".5") == Decimal(5, -1));
  CHECK(Decimal::parse("+7") == Decimal::from_int(7));
  CHECK(Decimal::parse("0.000") == Decimal());
  CHECK_FALSE(Decimal::parse("").has_value());
  CHECK_FALSE(Decimal::parse("1e5").has_value());
  CHECK_FALSE(Decimal::parse("1,000").has_value());
  CHECK_FALSE(Decimal::parse(" 1").has_value());
  CHECK_FALSE(Decimal::parse("1.").has_value());
  CHECK_FALSE(Decimal::parse("-").has_value());
}

TEST_CASE("decimal renders shortest plain notation") {
  CHECK(Decimal(251, 1).to_string() == "2510");
  CHECK(Decimal(251, -2).to_string() == "2.51");
  CHECK(Decimal(-5, -3).to_string() == "-0.005");
  CHECK(Decimal().to_string() == "0");
  CHECK(Decimal(251, -2).decimals() == 2);
}

TEST_CASE("decimal rounding is half away from zero") {
  CHECK(Decimal::parse("2.515")->rounded(2) == *Decimal::parse("2.52"));
  CHECK(Decimal::parse("-2.515")->rounded(2) == *Decimal::parse("-2.52"));
  CHECK(Decimal::parse("2.514")->rounded(2) == *Decimal::parse("2.51"));
  CHECK(Decimal::parse("2.5123")->rounded(2) == *Decimal::parse("2.51"));
  CHECK(Decimal::parse("1250")->rounded(-2) == *Decimal::parse("1300"));
  CHECK(Decimal::parse("7")->rounded(3) == Decimal::from_int(7));
}

TEST_CASE("decimal arithmetic and ordering") {
  const Decimal a = *Decimal::parse("0.1"), b = *Decimal::parse("0.2");
  CHECK(a + b == *Decimal::parse("0.3"));
  CHECK(b - a == a);
  CHECK((a * 30) == Decimal::from_int(3));
  CHECK(a < b);
  CHECK(*Decimal::parse("-1.5") < *Decimal::parse("-1.25"));
  CHECK(Decimal(25123, -1).scaled_pow10(-3) == *Decimal::parse("2.5123"));
}

TEST_CASE("divide_rounded matches integer arithmetic") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(-100000, 100000), den(1, 997);
  for (int i = 0; i < 500; ++i) {
    const long n = num(rng), d = den(rng);
    // round(n/d, 2) computed in integers: round half away from zero of 100n/d
    const long long scaled = 100LL * n;
    const long long q = (2 * std::llabs(scaled) + d) / (2LL * d);
    const long long expect = scaled < 0 ? -q : q;
    const auto got = divide_rounded(Decimal::from_int(n), Decimal::from_int(d), 2);
    REQUIRE(got.has_value());
    CHECK(*got == Decimal(expect, -2));
  }
  CHECK_FALSE(divide_rounded(Decimal::from_int(1), Decimal(), 2).has_value());
}
