#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace causalkit {

/// Exact rational number used for every probability at the finite scale.
using Rational = mpq_class;

/// Parses "3/8", "1", "0" or "-2/4" into a canonical rational.
/// Throws ParseError on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical form: lowest terms, positive denominator, "n" when the
/// denominator is 1.
std::string to_string(const Rational& value);

}  // namespace causalkit
