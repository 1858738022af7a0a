#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace rxl {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// ln of a positive big integer / rational, safe where a double conversion
// would overflow or underflow. Zero maps to -infinity.
double log_big(const BigInt& n);
double log_rational(const Rational& r);

// Parses "3", "3/4" or "0.75" into an exact rational.
Rational rational_from_string(std::string_view text);

std::string rational_to_string(const Rational& r);

}  // namespace rxl
