#include <doctest.h>

#include "hyperorbit/numeric.hpp"

using namespace hyperorbit;

TEST_CASE("parse_rational accepts decimal, exponent and fraction forms") {
  CHECK(parse_rational("12") == Rational(12));
  CHECK(parse_rational("-0.0625") == Rational(-1, 16));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("3.5E+2") == Rational(350));
  CHECK(parse_rational(" 2/-6 ") == Rational(-1, 3));
  CHECK(parse_rational(".5") == Rational(1, 2));
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("1e"), Error);
}

TEST_CASE("format_rational prefers terminating decimals") {
  CHECK(format_rational(Rational(1, 16)) == "0.0625");
  CHECK(format_rational(Rational(-1, 2)) == "-0.5");
  CHECK(format_rational(Rational(1, 3)) == "1/3");
  CHECK(format_rational(Rational(81)) == "81");
  CHECK(format_rational(Rational(-1, 512)) == "-0.001953125");
  for (const char* text : {"0.0625", "-3/7", "123456.789", "1/1024"}) {
    CHECK(parse_rational(format_rational(parse_rational(text))) == parse_rational(text));
  }
}

TEST_CASE("format_real round-trips bit-exactly") {
  PrecisionScope scope(128);
  const Real x = mp::log(Real(3)) / 7;
  const Real back = parse_real(format_real(x));
  CHECK(back == x);
  CHECK(format_real(Real(-0.5), 3) == "-5.00e-01");
}

TEST_CASE("PrecisionScope restores the previous precision") {
  PrecisionScope outer(50);
  {
    PrecisionScope inner(256);
    CHECK(working_digits() == 256);
    CHECK(promote(Real(1)).precision() == 256);
  }
  CHECK(working_digits() == 50);
}

TEST_CASE("huge exponents stay finite") {
  PrecisionScope scope(128);
  const Real big = int_pow(Real(27), 100000);
  CHECK(mp::isfinite(big));
  CHECK(mp::abs(mp::log(big) - 100000 * mp::log(Real(27))) < mp::pow(Real(10), -100));
  const Real small = int_pow(Real(0.5), 64 * 64 * 1000);
  CHECK(small > 0);
}

TEST_CASE("ordered_sum adds from largest magnitude down") {
  PrecisionScope scope(30);
  std::vector<Real> terms = {Real(1), mp::pow(Real(10), 40), Real(1), -mp::pow(Real(10), 40)};
  CHECK(ordered_sum(terms) == 2);
}

TEST_CASE("wrap_angle lands in [0, 2 pi)") {
  PrecisionScope scope(60);
  CHECK(wrap_angle(Real(-1)) > 0);
  CHECK(wrap_angle(two_pi()) < Real(1e-50));
  CHECK(mp::abs(wrap_angle(Real(16)) - (16 - 2 * two_pi())) < Real(1e-50));
}
