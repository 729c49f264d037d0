#include <doctest.h>

#include "hyperorbit/field_element.hpp"

#include <random>

using namespace hyperorbit;

namespace {
Real tol(int digits) { return mp::pow(Real(10), -digits); }
}  // namespace

TEST_CASE("products add log magnitudes and phases") {
  PrecisionScope scope(128);
  const auto a = FieldElement::from_rational(Rational(-1, 2));
  const auto b = FieldElement::from_rational(Rational(3));
  const auto p = a * b;
  CHECK(p.sign() == -1);
  CHECK(*p.exact_modulus() == Rational(3, 2));
  CHECK(mp::abs(p.log_mag() - (a.log_mag() + b.log_mag())) == 0);
  CHECK(p.to_real() == Real(-1.5));

  const auto z = FieldElement::from_modulus_arg(Rational(1, 2), Real(1));
  const auto z4 = z.pow(4);
  CHECK(*z4.exact_modulus() == Rational(1, 16));
  CHECK(mp::abs(z4.arg() - 4) < tol(120));
  const auto z2z2 = z.pow(2) * z.pow(2);
  CHECK(mp::abs(z2z2.arg() - z4.arg()) < tol(120));
}

TEST_CASE("powers of a sign-carrying element") {
  PrecisionScope scope(64);
  const auto a = FieldElement::from_rational(Rational(-1, 2));
  CHECK(a.pow(3).to_real() == Real(-0.125));
  CHECK(a.pow(2).to_real() == Real(0.25));
  CHECK(a.pow(-3).to_real() == Real(-8));
  CHECK(a.pow(0).to_real() == 1);
  // far outside double range
  const auto huge = FieldElement::from_rational(Rational(3)).pow(5'000'000);
  CHECK_FALSE(huge.exact_modulus().has_value());
  CHECK(mp::isfinite(huge.modulus()));
}

TEST_CASE("property: log_mag(x^j x^k) matches (j+k) log_mag(x)") {
  PrecisionScope scope(128);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Rational q(static_cast<long>(rng() % 999 + 1), static_cast<long>(rng() % 999 + 1));
    const auto x = FieldElement::from_rational(q, trial % 2 ? Field::Complex : Field::Real);
    const long j = static_cast<long>(rng() % 5000);
    const long k = static_cast<long>(rng() % 5000);
    const Real lhs = (x.pow(j) * x.pow(k)).log_mag();
    const Real rhs = x.log_mag() * (j + k);
    const Real scale = mp::abs(rhs) + 1;
    CHECK(mp::abs(lhs - rhs) <= 4 * unit_roundoff() * scale);
  }
}

TEST_CASE("property: rectangular round trip preserves log_mag") {
  PrecisionScope scope(128);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Real re = Real(static_cast<long>(rng() % 20001) - 10000) / 997;
    const Real im = Real(static_cast<long>(rng() % 20001) - 10000) / 991;
    const Complex z(re, im);
    if (is_zero(z)) continue;
    const auto x = FieldElement::from_complex(z);
    const auto back = FieldElement::from_complex(x.to_complex());
    CHECK(mp::abs(back.log_mag() - x.log_mag()) <= 2 * unit_roundoff() * (mp::abs(x.log_mag()) + 1));

    const auto r = FieldElement::from_real(re == 0 ? Real(1) : re);
    const auto r_back = FieldElement::from_real(r.to_real());
    CHECK(mp::abs(r_back.log_mag() - r.log_mag()) <= 2 * unit_roundoff() * (mp::abs(r.log_mag()) + 1));
  }
}

TEST_CASE("zero sentinel") {
  PrecisionScope scope(64);
  const auto z = FieldElement::zero(Field::Real);
  CHECK(z.is_zero());
  CHECK(mp::isinf(z.log_mag()));
  CHECK(z.log_mag() < 0);
  CHECK((z * FieldElement::from_rational(Rational(3))).is_zero());
  CHECK_THROWS_AS(z.inverse(), Error);
}

TEST_CASE("complex arguments wrap into [0, 2 pi)") {
  PrecisionScope scope(64);
  const auto z = FieldElement::from_modulus_arg(Rational(1, 2), Real(1)).pow(9);
  CHECK(z.arg() >= 0);
  CHECK(z.arg() < two_pi());
  CHECK(mp::abs(z.arg() - (9 - two_pi())) < tol(55));
  const auto w = FieldElement::from_rational(Rational(-2), Field::Complex);
  CHECK(mp::abs(w.arg() - pi()) < tol(60));
  CHECK_THROWS_AS(z.to_real(), Error);
}
