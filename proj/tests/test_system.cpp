#include <doctest.h>

#include "hyperorbit/system.hpp"

#include <algorithm>
#include <random>

using namespace hyperorbit;

namespace {

FieldElement q(long num, long den = 1) { return FieldElement::from_rational(Rational(num, den)); }

bool has_failed(const ValidationReport& report, const std::string& needle) {
  return std::any_of(report.checks.begin(), report.checks.end(), [&](const CheckResult& c) {
    return !c.passed && c.name.find(needle) != std::string::npos;
  });
}

Real tol(int digits) { return mp::pow(Real(10), -digits); }

}  // namespace

TEST_CASE("real family entries") {
  PrecisionScope scope(128);
  const auto one = build_real_example(1);
  CHECK(*one.a_entries()[0][0].exact_real() == 3);
  CHECK(*one.b_entries()[0].exact_real() == Rational(-1, 2));
  const auto two = build_real_example(2);
  CHECK(*two.a_entries()[1][0].exact_real() == 3);
  CHECK(*two.a_entries()[1][1].exact_real() == 9);
  CHECK(two.a_entries()[0][1].is_zero());
  CHECK(*two.b_entries()[1].exact_real() == Rational(1, 16));
  CHECK(two.accepted());
  CHECK_THROWS_AS(build_real_example(0), Error);
}

TEST_CASE("complex family entries") {
  PrecisionScope scope(128);
  const auto one = build_complex_example(1);
  CHECK(*one.b_entries()[0].exact_modulus() == Rational(1, 2));
  CHECK(mp::abs(one.b_entries()[0].arg() - 1) < tol(120));
  const auto two = build_complex_example(2);
  CHECK(*two.b_entries()[1].exact_modulus() == Rational(1, 16));
  CHECK(mp::abs(two.b_entries()[1].arg() - 4) < tol(120));
  CHECK(build_complex_example(3).accepted());
}

TEST_CASE("both families validate for n = 1..8") {
  PrecisionScope scope(128);
  for (int n = 1; n <= 8; ++n) {
    INFO("n = " << n);
    const auto real = build_real_example(n);
    CHECK(real.accepted());
    CHECK(real.validation()->reasons().empty());
    CHECK(build_complex_example(n).accepted());
  }
}

TEST_CASE("tampered variants are rejected at the right link") {
  PrecisionScope scope(128);
  const auto base = build_real_example(3);
  auto a = base.a_entries();
  auto b = base.b_entries();

  auto b1 = b;
  b1[0] = q(2);
  CHECK(has_failed(validate_theorem1(a, b1), "|B_1| < 1"));

  auto swapped = b;
  std::swap(swapped[1], swapped[2]);
  CHECK(has_failed(validate_theorem1(a, swapped), "|B_3| < |B_2|"));

  auto flat = b;
  flat[2] = q(1, 32);
  const auto flat_report = validate_theorem1(a, flat);
  CHECK_FALSE(flat_report.accepted);
  CHECK(has_failed(flat_report, "prec (B_3/B_1, A_3/A_1) < (B_2/B_1, A_2/A_1)"));
  CHECK_FALSE(has_failed(flat_report, "|B_"));

  auto positive = b;
  positive[0] = q(1, 2);
  CHECK(has_failed(validate_theorem1(a, positive), "generating (B_1, A_1)"));

  auto rational = b;
  rational[0] = q(-1, 3);
  const auto rational_report = validate_theorem1(a, rational);
  CHECK(has_failed(rational_report, "generating (B_1, A_1)"));
  CHECK(rational_report.pairs[0].certificate == Certificate::RefutedRationalRatio);

  auto decoupled = a;
  decoupled[1][0] = FieldElement::zero(Field::Real);
  const auto decoupled_report = validate_theorem1(decoupled, b);
  CHECK(has_failed(decoupled_report, "condition (ii)"));
  CHECK(decoupled_report.reasons().size() == 1);
}

TEST_CASE("affine validation") {
  PrecisionScope scope(128);
  const auto sys = build_affine_example();
  CHECK(sys.accepted());
  REQUIRE(sys.validation()->column.size() == 1);
  CHECK(mp::abs(parse_real(sys.validation()->column[0]) - Real(0.5)) < tol(35));

  CHECK_FALSE(validate_theorem2({{q(3)}}, {q(0)}, {q(-1, 2)}).accepted);
  const auto positive = validate_theorem2({{q(3)}}, {q(1)}, {q(1, 2)});
  CHECK_FALSE(positive.accepted);
  CHECK(positive.pairs[0].certificate == Certificate::RefutedSignCoverage);
  try {
    validate_theorem2({{q(1)}}, {q(1)}, {q(-1, 2)});
    FAIL("expected SingularAminusI");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularAminusI);
  }
}

TEST_CASE("affine lift") {
  PrecisionScope scope(128);
  const auto sys = build_affine_example();
  const auto lifted = lift_affine(sys, q(9), q(-1, 2));
  CHECK(*lifted.a_entries()[0][0].exact_real() == 9);
  CHECK(*lifted.a_entries()[1][0].exact_real() == 9);
  CHECK(*lifted.a_entries()[1][1].exact_real() == 27);
  CHECK(*lifted.b_entries()[0].exact_real() == Rational(-1, 2));
  CHECK(*lifted.b_entries()[1].exact_real() == Rational(1, 4));
  CHECK(lifted.accepted());
  const auto& column = lifted.validation()->column;
  REQUIRE(column.size() == 2);
  CHECK(parse_real(column[0]) == 1);
  CHECK(mp::abs(parse_real(column[1]) + Real(0.5)) < tol(35));

  const auto defaulted = lift_affine(sys);
  CHECK(*defaulted.a_entries()[0][0].exact_real() == 9);
  CHECK(defaulted.accepted());

  try {
    lift_affine(sys, q(2), q(-1, 2));
    FAIL("expected PrecViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PrecViolation);
  }
}

TEST_CASE("phi and psi") {
  PrecisionScope scope(128);
  Vector<Real> x(2);
  x << Real(2), Real(3);
  const Vector<Real> y = psi(x);
  CHECK(y(0) == 1);
  CHECK(y(1) == 2);
  CHECK(y(2) == 3);
  Vector<Real> z(3);
  z << Real(2), Real(4), Real(6);
  CHECK(phi(z) == x);
  z(0) = 0;
  CHECK_THROWS_AS(phi(z), Error);

  std::mt19937_64 rng(21);
  const auto lifted = lift_affine(build_affine_example(), q(9), q(-1, 2));
  const auto a = lifted.a();
  const auto b = lifted.b();
  for (int i = 0; i < 100; ++i) {
    Vector<Real> v(1);
    v(0) = Real(static_cast<long>(rng() % 2'000'001) - 1'000'000) / 1000;
    CHECK(phi<Real>(psi(v)) == v);
    const Vector<Real> through_a = phi<Real>(a.multiply(psi(v)));
    const Vector<Real> through_b = phi<Real>(mat_pow_apply(b, 1, psi(v)));
    CHECK(mp::abs(through_a(0) - (3 * v(0) + 1)) < tol(30));
    CHECK(mp::abs(through_b(0) + v(0) / 2) < tol(30));
  }
}

TEST_CASE("quadrant system") {
  PrecisionScope scope(128);
  const auto [sys, report] = build_quadrant_example();
  CHECK(report.accepted);
  CHECK(sys.n() == 2);
  CHECK(*sys.a_entries()[1][0].exact_real() == 1);
  CHECK(*sys.b_entries()[1].exact_real() == Rational(1, 16));
  CHECK(report.pairs.size() == 2);
  CHECK(report.pairs[0].log_ratio < report.pairs[1].log_ratio);

  QuadrantParameters swapped;
  std::swap(swapped.u, swapped.v);
  CHECK(has_failed(build_quadrant_example(swapped).second, "u > v"));
  QuadrantParameters flat;
  flat.b = 0;
  CHECK(has_failed(build_quadrant_example(flat).second, "b > 0"));
}

TEST_CASE("systems reject inconsistent shapes") {
  PrecisionScope scope(64);
  CHECK_THROWS_AS(SemigroupSystem<Real>({{q(3)}}, {q(-1, 2), q(1, 4)}), Error);
  CHECK_THROWS_AS(SemigroupSystem<Real>({{q(3)}}, {q(-1, 2)}, {q(1), q(2)}), Error);
  const auto z = FieldElement::from_modulus_arg(Rational(1, 2), Real(1));
  CHECK_THROWS_AS(SemigroupSystem<Real>({{q(3)}}, {z}), Error);
  const SemigroupSystem<Real> upper({{q(3), q(1)}, {q(0), q(9)}}, {q(-1, 2), q(1, 16)});
  CHECK_FALSE(upper.validated().accepted());
}
