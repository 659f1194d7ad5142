#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace liqgame {

// All model arithmetic is exact. Every numeric quantity in a game, a payout
// or a report is an arbitrary-precision rational in canonical (reduced,
// positive-denominator) form, so equality is structural and no comparison
// ever goes through floating point.
using Rational = mpq_class;

// Parses "42", "-3", "13.5", "8.2", "11/2", "-7/6". Decimal literals are
// exact base-10 rationals, never binary floats. Throws std::invalid_argument
// on anything else (including zero denominators).
Rational parse_rational(std::string_view text);

// Canonical fraction string: "29/3", or just "10" when the denominator is 1.
// parse_rational(fraction_string(x)) == x.
std::string fraction_string(const Rational& value);

// Decimal approximation at `significant_digits` significant digits with
// round-half-even tie breaking. Fixed notation for moderate exponents,
// scientific ("1.23457e+21") outside of that. Output is deterministic.
std::string decimal_string(const Rational& value, int significant_digits = 6);

}  // namespace liqgame
