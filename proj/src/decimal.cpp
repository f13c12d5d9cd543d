#include "chats/decimal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chats {

namespace {

using i128 = __int128;

constexpr int kMaxStoredDigits = 18;

i128 pow10(int k) {
  i128 r = 1;
  for (int i = 0; i < k; ++i) r *= 10;
  return r;
}

int digit_count(i128 v) {
  if (v < 0) v = -v;
  int n = 1;
  while (v >= 10) {
    v /= 10;
    ++n;
  }
  return n;
}

// Divide by 10^k rounding half away from zero.
i128 drop_digits(i128 v, int k) {
  if (k <= 0) return v;
  if (k > 38) return 0;
  const i128 p = pow10(k);
  i128 q = v / p;
  i128 r = v % p;
  if (r < 0) r = -r;
  if (r * 2 >= p) q += (v < 0 ? -1 : 1);
  return q;
}

std::pair<std::int64_t, int> canonical(i128 coeff, int exponent) {
  if (coeff == 0) return {0, 0};
  int digits = digit_count(coeff);
  if (digits > kMaxStoredDigits) {
    const int drop = digits - kMaxStoredDigits;
    coeff = drop_digits(coeff, drop);
    exponent += drop;
  }
  while (coeff != 0 && coeff % 10 == 0) {
    coeff /= 10;
    ++exponent;
  }
  if (coeff == 0) return {0, 0};
  return {static_cast<std::int64_t>(coeff), exponent};
}

}  // namespace

Decimal::Decimal(std::int64_t coefficient, int exponent) {
  auto [c, e] = canonical(coefficient, exponent);
  coefficient_ = c;
  exponent_ = e;
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  int fraction_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch >= '0' && ch <= '9') {
      any_digit = true;
      digits.push_back(ch);
      if (seen_point) ++fraction_digits;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      return std::nullopt;
    }
  }
  if (!any_digit || (seen_point && fraction_digits == 0)) return std::nullopt;

  std::size_t first = digits.find_first_not_of('0');
  if (first == std::string::npos) return Decimal();
  digits.erase(0, first);

  int exponent = -fraction_digits;
  bool round_up = false;
  if (static_cast<int>(digits.size()) > kMaxSignificant) {
    round_up = digits[kMaxSignificant] >= '5';
    exponent += static_cast<int>(digits.size()) - kMaxSignificant;
    digits.resize(kMaxSignificant);
  }
  i128 coeff = 0;
  for (char ch : digits) coeff = coeff * 10 + (ch - '0');
  if (round_up) ++coeff;
  if (negative) coeff = -coeff;
  auto [c, e] = canonical(coeff, exponent);
  Decimal d;
  d.coefficient_ = c;
  d.exponent_ = e;
  return d;
}

Decimal Decimal::scaled_pow10(int k) const {
  if (is_zero()) return {};
  Decimal d = *this;
  d.exponent_ += k;
  return d;
}

Decimal Decimal::rounded(int places) const {
  if (decimals() <= places) return *this;
  const int drop = -exponent_ - places;
  auto [c, e] = canonical(drop_digits(coefficient_, drop), -places);
  Decimal d;
  d.coefficient_ = c;
  d.exponent_ = e;
  return d;
}

std::string Decimal::to_string() const {
  if (coefficient_ == 0) return "0";
  const bool negative = coefficient_ < 0;
  i128 mag = coefficient_;
  if (mag < 0) mag = -mag;
  std::string digits;
  while (mag > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(mag % 10)));
    mag /= 10;
  }
  std::string out;
  if (exponent_ >= 0) {
    out = digits + std::string(static_cast<std::size_t>(exponent_), '0');
  } else {
    const int frac = -exponent_;
    if (static_cast<int>(digits.size()) <= frac) {
      out = "0." + std::string(static_cast<std::size_t>(frac) - digits.size(), '0') + digits;
    } else {
      out = digits.substr(0, digits.size() - frac) + "." + digits.substr(digits.size() - frac);
    }
  }
  return negative ? "-" + out : out;
}

double Decimal::to_double() const {
  // Routed through the decimal string so the conversion is correctly rounded.
  return std::stod(to_string());
}

Decimal operator+(const Decimal& a, const Decimal& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const int lo = std::min(a.exponent_, b.exponent_);
  const int gap_a = a.exponent_ - lo;
  const int gap_b = b.exponent_ - lo;
  if (gap_a > 19 || gap_b > 19) {
    // The smaller operand is below the 18-digit resolution of the larger one.
    const Decimal& big = gap_a > gap_b ? a : b;
    return big;
  }
  const i128 sum = static_cast<i128>(a.coefficient_) * pow10(gap_a) +
                   static_cast<i128>(b.coefficient_) * pow10(gap_b);
  auto [c, e] = canonical(sum, lo);
  Decimal d;
  d.coefficient_ = c;
  d.exponent_ = e;
  return d;
}

Decimal operator*(const Decimal& a, std::int64_t k) {
  auto [c, e] = canonical(static_cast<i128>(a.coefficient_) * k, a.exponent_);
  Decimal d;
  d.coefficient_ = c;
  d.exponent_ = e;
  return d;
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  const int sa = (a.coefficient_ > 0) - (a.coefficient_ < 0);
  const int sb = (b.coefficient_ > 0) - (b.coefficient_ < 0);
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  const int lo = std::min(a.exponent_, b.exponent_);
  const int gap_a = a.exponent_ - lo;
  const int gap_b = b.exponent_ - lo;
  if (gap_a <= 19 && gap_b <= 19) {
    const i128 va = static_cast<i128>(a.coefficient_) * pow10(gap_a);
    const i128 vb = static_cast<i128>(b.coefficient_) * pow10(gap_b);
    return va <=> vb;
  }
  // Exponents far apart: order of magnitude decides.
  const int mag_a = a.exponent_ + digit_count(a.coefficient_);
  const int mag_b = b.exponent_ + digit_count(b.coefficient_);
  return sa > 0 ? (mag_a <=> mag_b) : (mag_b <=> mag_a);
}

std::optional<Decimal> divide_rounded(const Decimal& numerator, const Decimal& denominator,
                                      int places) {
  if (denominator.is_zero()) return std::nullopt;
  if (numerator.is_zero()) return Decimal();
  const int shift = numerator.exponent() - denominator.exponent() + places;
  i128 n = numerator.coefficient();
  i128 d = denominator.coefficient();
  if (shift >= 0) {
    if (shift > 19) throw std::overflow_error("decimal division out of range");
    n *= pow10(shift);
  } else {
    if (-shift > 19) return Decimal();
    d *= pow10(-shift);
  }
  i128 q = n / d;
  i128 r = n % d;
  if (r < 0) r = -r;
  const i128 ad = d < 0 ? -d : d;
  if (r * 2 >= ad) q += ((n < 0) != (d < 0)) ? -1 : 1;
  if (q > std::numeric_limits<std::int64_t>::max() || q < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("decimal division out of range");
  return Decimal(static_cast<std::int64_t>(q), -places);
}

}  // namespace chats
