#include "rxl/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "rxl/errors.hpp"

namespace rxl {

double log_big(const BigInt& n) {
  if (n < 0) throw input_error("log of a negative integer");
  if (n == 0) return -std::numeric_limits<double>::infinity();
  const unsigned bits = boost::multiprecision::msb(n);
  if (bits < 512) return std::log(n.convert_to<double>());
  // Shift down so the mantissa fits a double, then add back k*ln2.
  const unsigned shift = bits - 510;
  BigInt top = n >> shift;
  return std::log(top.convert_to<double>()) + shift * 0.6931471805599453094;
}

double log_rational(const Rational& r) {
  if (r < 0) throw input_error("log of a negative rational");
  if (r == 0) return -std::numeric_limits<double>::infinity();
  return log_big(numerator(r)) - log_big(denominator(r));
}

Rational rational_from_string(std::string_view text) {
  auto bad = [&] {
    throw input_error("cannot parse rational from '" + std::string(text) + "'");
  };
  if (text.empty()) bad();

  std::string s(text);
  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    negative = s[i] == '-';
    ++i;
  }
  std::string digits, frac_digits, den_digits;
  enum { Int, Frac, Den } state = Int;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      (state == Int ? digits : state == Frac ? frac_digits : den_digits) += c;
    } else if (c == '.' && state == Int) {
      state = Frac;
    } else if (c == '/' && state == Int) {
      state = Den;
    } else {
      bad();
    }
  }
  if (digits.empty() && frac_digits.empty()) bad();

  Rational r;
  if (state == Den) {
    if (digits.empty() || den_digits.empty()) bad();
    BigInt den(den_digits);
    if (den == 0) bad();
    r = Rational(BigInt(digits), den);
  } else {
    BigInt num = digits.empty() ? BigInt(0) : BigInt(digits);
    r = Rational(num);
    if (!frac_digits.empty()) {
      BigInt scale = 1;
      for (std::size_t k = 0; k < frac_digits.size(); ++k) scale *= 10;
      r += Rational(BigInt(frac_digits), scale);
    }
  }
  return negative ? -r : r;
}

std::string rational_to_string(const Rational& r) {
  std::ostringstream out;
  out << numerator(r);
  if (denominator(r) != 1) out << "/" << denominator(r);
  return out.str();
}

}  // namespace rxl
