#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chats {

// Exact base-10 number: coefficient * 10^exponent.
//
// Values are kept canonical (no trailing zeros in the coefficient, zero has
// exponent 0), so structural equality is numeric equality. Parsed literals
// are rounded to kMaxSignificant digits; arithmetic results are rounded to
// the int64 range (18 digits) if they would overflow.
class Decimal {
 public:
  static constexpr int kMaxSignificant = 12;

  constexpr Decimal() = default;
  Decimal(std::int64_t coefficient, int exponent);

  static Decimal from_int(std::int64_t v) { return Decimal(v, 0); }

  // Plain literal: [+-]digits[.digits] or [+-].digits. No grouping, no
  // exponent notation, no surrounding whitespace.
  static std::optional<Decimal> parse(std::string_view text);

  std::int64_t coefficient() const { return coefficient_; }
  int exponent() const { return exponent_; }
  bool is_zero() const { return coefficient_ == 0; }
  bool is_negative() const { return coefficient_ < 0; }
  bool is_integer() const { return exponent_ >= 0; }

  // Digits after the decimal point in the shortest plain rendering.
  int decimals() const { return exponent_ < 0 ? -exponent_ : 0; }

  // value * 10^k, exact.
  Decimal scaled_pow10(int k) const;

  // Round half away from zero to `places` digits after the decimal point.
  Decimal rounded(int places) const;

  Decimal abs() const { return Decimal(coefficient_ < 0 ? -coefficient_ : coefficient_, exponent_); }
  Decimal operator-() const { return Decimal(-coefficient_, exponent_); }

  // Shortest plain notation ("2510", "2.51", "-0.005").
  std::string to_string() const;
  double to_double() const;

  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b) { return a + (-b); }
  friend Decimal operator*(const Decimal& a, std::int64_t k);

  friend bool operator==(const Decimal&, const Decimal&) = default;
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

 private:
  std::int64_t coefficient_ = 0;
  int exponent_ = 0;
};

// round(numerator / denominator, places), half away from zero, exact.
// Returns nullopt when the denominator is zero.
std::optional<Decimal> divide_rounded(const Decimal& numerator, const Decimal& denominator,
                                      int places);

}  // namespace chats
