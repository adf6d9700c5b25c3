#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace dirboot {

// Exact coefficients for all symbolic work.
using Rational = boost::multiprecision::cpp_rational;

// Parses "3", "-2", "1/4", "0.25" (finite decimals only).
Rational parse_rational(std::string_view text);

// "2", "-1/3"
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace dirboot
