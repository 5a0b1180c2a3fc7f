#include "doctest.h"
#include "twic/rational.hpp"

using twic::Rational;
using twic::parse_rational;

TEST_CASE("rational arithmetic stays normalized") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK((Rational(1, 2) * Rational(2, 3)) == Rational(1, 3));
    CHECK((Rational(7, 2) - Rational(3)) == Rational(1, 2));
    CHECK((Rational(1, 2) / Rational(1, 4)) == Rational(2));
    CHECK(Rational(0, 5) == Rational(0));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(0));
}

TEST_CASE("string renderings") {
    CHECK(Rational(3, 2).to_string() == "3/2");
    CHECK(Rational(4, 2).to_string() == "2");
    CHECK(Rational(1, 2).to_decimal_string() == "0.5");
    CHECK(Rational(1).to_decimal_string() == "1");
    CHECK(Rational(0).to_decimal_string() == "0");
    CHECK(Rational(3, 8).to_decimal_string() == "0.375");
    CHECK(Rational(-3, 4).to_decimal_string() == "-0.75");
    CHECK(Rational(1, 3).to_decimal_string() == "0.333333333333333");
    CHECK(Rational(5, 4).to_decimal_string() == "1.25");
}

TEST_CASE("parsing") {
    CHECK(parse_rational("1/2") == Rational(1, 2));
    CHECK(parse_rational("3") == Rational(3));
    CHECK(parse_rational("-2/6") == Rational(-1, 3));
    CHECK(!parse_rational("").has_value());
    CHECK(!parse_rational("1/").has_value());
    CHECK(!parse_rational("a/b").has_value());
    CHECK(!parse_rational("1/0").has_value());
    CHECK(!parse_rational("1.5").has_value());
}
