#include "doctest.h"
#include "liqgame/rational.hpp"

using liqgame::decimal_string;
using liqgame::fraction_string;
using liqgame::parse_rational;
using liqgame::Rational;

TEST_CASE("parses integers, decimals and fractions exactly") {
    CHECK(parse_rational("42") == Rational(42));
    CHECK(parse_rational("-3") == Rational(-3));
    CHECK(parse_rational("+5") == Rational(5));
    CHECK(parse_rational("13.5") == Rational(27, 2));
    CHECK(parse_rational("8.2") == Rational(41, 5));
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational(".5") == Rational(1, 2));
    CHECK(parse_rational("2.") == Rational(2));
    CHECK(parse_rational("11/2") == Rational(11, 2));
    CHECK(parse_rational("-7/6") == Rational(-7, 6));
    CHECK(parse_rational("4/6") == Rational(2, 3));  // canonicalized
    CHECK(parse_rational("0") == 0);
    CHECK(parse_rational("123456789012345678901234567890") ==
          Rational(mpz_class("123456789012345678901234567890")));
}

TEST_CASE("rejects malformed numbers") {
    for (const char* bad : {"", "a", "1/0", "1.2.3", "--1", "1e5", "1 /2", "/3", "5/", ".",
                            "-", "0x10"})
        CHECK_THROWS_AS(parse_rational(bad), std::invalid_argument);
}

TEST_CASE("fraction strings round-trip") {
    for (const char* text : {"29/3", "10", "-7/6", "0", "464/25"}) {
        Rational x = parse_rational(text);
        CHECK(fraction_string(x) == text);
        CHECK(parse_rational(fraction_string(x)) == x);
    }
}

TEST_CASE("decimal strings use six significant digits") {
    CHECK(decimal_string(Rational(7, 6)) == "1.16667");
    CHECK(decimal_string(Rational(8, 9)) == "0.888889");
    CHECK(decimal_string(Rational(464, 25)) == "18.5600");
    CHECK(decimal_string(Rational(2)) == "2.00000");
    CHECK(decimal_string(Rational(0)) == "0");
    CHECK(decimal_string(Rational(-7, 6)) == "-1.16667");
    CHECK(decimal_string(Rational(1, 128)) == "0.00781250");
    CHECK(decimal_string(Rational(123456789)) == "123457000");
    CHECK(decimal_string(parse_rational("41/21")) == "1.95238");
}

TEST_CASE("decimal rounding is half-to-even") {
    CHECK(decimal_string(parse_rational("1.000005")) == "1.00000");
    CHECK(decimal_string(parse_rational("1.000015")) == "1.00002");
    CHECK(decimal_string(Rational(1, 8), 2) == "0.12");
    CHECK(decimal_string(Rational(3, 8), 2) == "0.38");
}

TEST_CASE("decimal strings fall back to scientific notation") {
    Rational big = Rational(mpz_class("100000000000000000000")) / 3;  // ~3.3e19
    CHECK(decimal_string(big) == "3.33333e+19");
    CHECK(decimal_string(Rational(1, 10000000)) == "1.00000e-07");
}
