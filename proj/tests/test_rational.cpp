#include <catch2/catch_amalgamated.hpp>

#include "prevision/rational.hpp"

using namespace prevision;

TEST_CASE("parse accepts integers, fractions, and decimal forms") {
  CHECK(parse_rational("7") == Rational(7));
  CHECK(parse_rational("-3/4") == Rational(-3) / 4);
  CHECK(parse_rational("0.6") == Rational(3) / 5);
  CHECK(parse_rational("-1.25") == Rational(-5) / 4);
  CHECK(parse_rational(".5") == Rational(1) / 2);
  CHECK(parse_rational("+2/6") == Rational(1) / 3);
  CHECK(parse_rational("10/4") == Rational(5) / 2);
}

TEST_CASE("parse canonicalizes so equal values format identically") {
  CHECK(to_string(parse_rational("-7/21")) == "-1/3");
  CHECK(to_string(parse_rational("4/2")) == "2");
  CHECK(to_string(parse_rational("0/5")) == "0");
  CHECK(to_string(parse_rational("0.500")) == "1/2");
}

TEST_CASE("parse rejects malformed input") {
  for (const char* bad : {"", "abc", "1/", "/3", "1/0", "1.2.3", "2/-3", "1e3", "1 2", "--1"}) {
    CHECK_THROWS_AS(parse_rational(bad), ParseError);
  }
}

TEST_CASE("parse tolerates surrounding whitespace") {
  CHECK(parse_rational(" 1") == Rational(1));
  CHECK(parse_rational("3/4 ") == Rational(3) / 4);
}

TEST_CASE("string round trip is the identity on canonical forms") {
  for (const char* s : {"0", "1", "-1", "3/4", "-22/7", "1000000007/3"}) {
    CHECK(to_string(parse_rational(s)) == s);
  }
}

TEST_CASE("integer powers, including negative exponents") {
  CHECK(pow_int(Rational(2), 10) == Rational(1024));
  CHECK(pow_int(Rational(1) / 2, 5) == Rational(1) / 32);
  CHECK(pow_int(Rational(2) / 3, -2) == Rational(9) / 4);
  CHECK(pow_int(Rational(-2), 3) == Rational(-8));
  CHECK(pow_int(Rational(5), 0) == Rational(1));
  CHECK_THROWS_AS(pow_int(Rational(0), -1), OutOfRange);
}

TEST_CASE("floor and ceiling of rationals") {
  CHECK(floor_int(Rational(7) / 2) == 3);
  CHECK(floor_int(Rational(-7) / 2) == -4);
  CHECK(floor_int(Rational(4)) == 4);
  CHECK(ceil_int(Rational(7) / 2) == 4);
  CHECK(ceil_int(Rational(-7) / 2) == -3);
  CHECK(ceil_int(Rational(-4)) == -4);
}

TEST_CASE("exact square roots exist exactly for perfect squares") {
  auto r = exact_sqrt(Rational(9) / 16);
  REQUIRE(r.has_value());
  CHECK(*r == Rational(3) / 4);
  CHECK(exact_sqrt(Rational(0)) == Rational(0));
  CHECK(!exact_sqrt(Rational(2)).has_value());
  CHECK(!exact_sqrt(Rational(1) / 3).has_value());
  CHECK(!exact_sqrt(Rational(-1)).has_value());
}

TEST_CASE("decimal rendering is exact when the denominator allows it") {
  CHECK(decimal_string(Rational(3) / 4) == "0.75");
  CHECK(decimal_string(Rational(-1) / 8) == "-0.125");
  CHECK(decimal_string(Rational(5)) == "5");
  CHECK(decimal_string(Rational(1) / 1024) == "0.0009765625");
}

TEST_CASE("decimal rendering marks rounded values") {
  std::string s = decimal_string(Rational(1) / 3, 6);
  REQUIRE(!s.empty());
  CHECK(s.front() == '~');
  CHECK(s.find("0.333333") != std::string::npos);
}

TEST_CASE("sign helper") {
  CHECK(sign(Rational(5)) == 1);
  CHECK(sign(Rational(-2) / 7) == -1);
  CHECK(sign(Rational(0)) == 0);
}

TEST_CASE("double conversion is close for simple fractions") {
  CHECK(to_double(Rational(1) / 2) == 0.5);
  CHECK(to_double(Rational(-3) / 4) == -0.75);
}
