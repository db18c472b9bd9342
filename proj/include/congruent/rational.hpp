#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace congruent {

/// Exponents of measure powers are exact rationals so that repeated
/// re-exponentiation composes without drift and `r + s <= 1` is decidable.
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

/// Parses "3", "-2" or "1/4". Throws Error(kSchema) on malformed input.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

}  // namespace congruent
