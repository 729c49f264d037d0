#include <doctest.h>

#include "hyperorbit/scalar_steering.hpp"
#include "oracles.hpp"

#include <random>

using namespace hyperorbit;

namespace {

GeneratingPair real_pair(long an, long ad, long bn, long bd = 1) {
  return certify_generating(FieldElement::from_rational(Rational(an, ad)),
                            FieldElement::from_rational(Rational(bn, bd)));
}

FieldElement target(const char* text) { return FieldElement::from_rational(parse_rational(text)); }

// Returns true when a solution exists within the cap.
bool check_against_oracle(const GeneratingPair& p, const char* t, const char* e, std::int64_t cap) {
  SearchBudget budget;
  budget.max_exponent = cap;
  const Real eps = parse_real(e);
  const auto ref = oracle::exhaustive_scalar(p.a.to_real(), p.b.to_real(), parse_real(t), eps, cap);
  INFO("target " << t);
  if (!ref) {
    try {
      steer_scalar(p, target(t), eps, budget);
      FAIL("search returned a solution the oracle does not know");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::NotFound);
    }
    return false;
  }
  const auto sol = steer_scalar(p, target(t), eps, budget);
  CHECK(sol.m + sol.n == ref->m + ref->n);
  CHECK(sol.m == ref->m);
  CHECK(sol.error < eps);
  Real direct = 1;
  for (std::int64_t i = 0; i < sol.m; ++i) direct *= p.a.to_real();
  for (std::int64_t i = 0; i < sol.n; ++i) direct *= p.b.to_real();
  CHECK(mp::abs(direct - parse_real(t)) < eps);
  return true;
}

}  // namespace

TEST_CASE("target 1 is hit by the empty word") {
  PrecisionScope scope(128);
  const auto sol = steer_scalar(real_pair(-1, 2, 3), target("1"), Real(1e-3));
  CHECK(sol.m == 0);
  CHECK(sol.n == 0);
}

TEST_CASE("minimal exponents agree with exhaustive search") {
  PrecisionScope scope(128);
  const auto p = real_pair(-1, 2, 3);
  CHECK(check_against_oracle(p, "5.0", "1e-3", 2000));
  // no solution with exponents <= 2000
  CHECK_FALSE(check_against_oracle(p, "-7.25", "1e-3", 2000));
  SearchBudget wide;
  wide.max_exponent = 100000;
  const auto far = steer_scalar(p, target("-7.25"), Real(1e-3), wide);
  CHECK(far.used_convergents);
  CHECK(far.m > 2000);
  const Real direct = int_pow(Real(-0.5), static_cast<std::uint64_t>(far.m)) *
                      int_pow(Real(3), static_cast<std::uint64_t>(far.n));
  CHECK(mp::abs(direct + Real(7.25)) < Real(1e-3));
  check_against_oracle(p, "0.3", "0.05", 500);
  check_against_oracle(p, "-0.001", "0.01", 500);
  check_against_oracle(p, "100", "1", 500);
  const auto r = real_pair(2, 3, -5, 2);
  check_against_oracle(r, "2.5", "1e-3", 2000);
  check_against_oracle(r, "-0.04", "1e-4", 2000);
}

TEST_CASE("floors push the solution past the requested exponents") {
  PrecisionScope scope(128);
  const auto p = real_pair(-1, 2, 3);
  SearchBudget budget;
  budget.min_first = 40;
  budget.min_second = 10;
  const auto sol = steer_scalar(p, target("5"), Real(1e-3), budget);
  CHECK(sol.m >= 40);
  CHECK(sol.n >= 10);
  CHECK(sol.error < Real(1e-3));
}

TEST_CASE("complex pairs are steered by the bounded scan") {
  PrecisionScope scope(128);
  const auto a = FieldElement::from_modulus_arg(Rational(1, 2), Real(1));
  const auto b = FieldElement::from_rational(Rational(3), Field::Complex);
  const auto p = certify_generating(a, b);
  REQUIRE(p.certified());
  const auto t = FieldElement::from_complex(Complex(Real(2), Real(-1)));
  SearchBudget budget;
  budget.max_exponent = 3000;
  const auto sol = steer_scalar(p, t, Real(0.05), budget);
  const Complex value = (a.pow(sol.m) * b.pow(sol.n)).to_complex();
  CHECK(std::abs(value - t.to_complex()) < Real(0.05));
  CHECK_FALSE(sol.used_convergents);
}

TEST_CASE("errors") {
  PrecisionScope scope(64);
  CHECK_THROWS_AS(steer_scalar(real_pair(1, 2, 2), target("3"), Real(1e-3)), Error);
  CHECK_THROWS_AS(steer_scalar(real_pair(-1, 2, 3), target("0"), Real(1e-3)), Error);
  CHECK_THROWS_AS(steer_scalar(real_pair(-1, 2, 3), target("3"), Real(0)), Error);
  SearchBudget tight;
  tight.max_exponent = 3;
  try {
    steer_scalar(real_pair(-1, 2, 3), target("5"), Real(1e-9), tight);
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFound);
  }
}

TEST_CASE("first_hit matches brute force") {
  PrecisionScope scope(128);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const Real step = Real(static_cast<long>(rng() % 999'983 + 1)) / 1'000'003;
    const Real gamma = Real(static_cast<long>(rng() % 1'000'000)) / 1'000'000;
    const Real lo = Real(static_cast<long>(rng() % 990'000)) / 1'000'000;
    const Real hi = lo + Real(static_cast<long>(rng() % 5000 + 1)) / 1'000'000;
    const auto hit = first_hit(step, gamma, lo, hi, Real(200000));
    std::optional<long> brute;
    for (long x = 0; x <= 200000; ++x) {
      Real v = gamma + step * x;
      v -= mp::floor(v);
      if (v >= lo && v <= hi) {
        brute = x;
        break;
      }
    }
    INFO("trial " << trial);
    REQUIRE(hit.has_value() == brute.has_value());
    if (hit) {
      CHECK(*hit == *brute);
    }
  }
}

TEST_CASE("random targets agree with exhaustive search, hits and misses alike") {
  PrecisionScope scope(128);
  const auto p = real_pair(-1, 2, 3);
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 20; ++i) {
    const long raw = static_cast<long>(rng() % 20001) - 10000;
    if (raw == 0) continue;
    const std::string text = format_rational(Rational(raw, 1000));
    check_against_oracle(p, text.c_str(), "1e-3", 2000);
  }
}
