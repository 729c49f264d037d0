#include <doctest.h>

#include "hyperorbit/steering.hpp"
#include "oracles.hpp"

#include <random>

using namespace hyperorbit;

namespace {

Real tol(int digits) { return mp::pow(Real(10), -digits); }

Vector<Real> vec(std::initializer_list<Real> xs) {
  Vector<Real> v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (const auto& x : xs) v(i++) = x;
  return v;
}

// Exact rational evaluation of the word on the real family.
oracle::RVec exact_word(int n, const OrbitWord& word, const oracle::RVec& p) {
  const auto a = oracle::real_family_a(static_cast<std::size_t>(n));
  const auto b = oracle::real_family_b(static_cast<std::size_t>(n));
  oracle::RVec v = p;
  for (auto it = word.stages.rbegin(); it != word.stages.rend(); ++it) {
    v = oracle::apply(oracle::power_by_squaring(a, static_cast<std::uint64_t>(it->l)), v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] *= oracle::rational_pow(b[i], static_cast<std::uint64_t>(it->k));
    }
  }
  return v;
}

Real sup_error(const oracle::RVec& v, const Vector<Real>& y) {
  Real e(0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    e = std::max(e, Real(mp::abs(to_real(v[i]) - y(static_cast<Index>(i)))));
  }
  return e;
}

}  // namespace

TEST_CASE("word evaluation on the real family") {
  PrecisionScope scope(128);
  const auto sys = build_real_example(2);
  const Vector<Real> p = vec({1, 0});
  const Vector<Real> one = evaluate_word(sys, OrbitWord{{{1, 1}}}, p);
  CHECK(mp::abs(one(0) + Real(1.5)) < tol(120));
  CHECK(mp::abs(one(1) - Real(3) / 16) < tol(120));
  const Vector<Real> two = evaluate_word(sys, OrbitWord{{{0, 2}}}, p);
  CHECK(two(0) == 9);
  CHECK(two(1) == 36);
  CHECK(evaluate_word(sys, OrbitWord{}, p) == p);
}

TEST_CASE("word evaluation composes") {
  PrecisionScope scope(128);
  const auto sys = build_real_example(3);
  const Vector<Real> p = vec({1, Real(-2), Real(1) / 3});
  const OrbitWord outer{{{2, 1}, {0, 3}}};
  const OrbitWord inner{{{1, 0}, {3, 2}}};
  const Vector<Real> joint = evaluate_word(sys, outer.then_apply_after(inner), p);
  const Vector<Real> nested = evaluate_word(sys, outer, evaluate_word(sys, inner, p));
  CHECK(norm_inf(Vector<Real>(joint - nested)) < tol(110));
  CHECK(outer.then_apply_after(inner).total_exponent() == 12);

  oracle::RVec exact_p{Rational(1), Rational(-2), Rational(1, 3)};
  CHECK(sup_error(exact_word(3, outer.then_apply_after(inner), exact_p), joint) < tol(100));
}

TEST_CASE("n = 1 steering matches the scalar oracle") {
  PrecisionScope scope(128);
  const auto sys = build_real_example(1);
  const Real eps("1e-2");
  const auto result = synthesize_word(sys, vec({5}), eps);
  CHECK(result.error < eps);
  REQUIRE(result.word.stages.size() == 1);
  const auto [k, l] = result.word.stages[0];
  const auto best = oracle::exhaustive_scalar(Real(-0.5), Real(3), Real(5), eps, 2000);
  REQUIRE(best.has_value());
  CHECK(k + l == best->m + best->n);
  CHECK(sup_error(exact_word(1, result.word, {Rational(1)}), vec({5})) < eps);
}

TEST_CASE("n = 2 steering reaches (1, -1)") {
  PrecisionScope scope(128);
  const auto sys = build_real_example(2);
  const Real eps("1e-2");
  const Vector<Real> y = vec({1, -1});
  const auto result = synthesize_word(sys, y, eps);
  CHECK(result.error < eps);
  CHECK(result.word.stages.size() <= 2);
  CHECK(result.stages.size() == 2);
  CHECK(sup_error(exact_word(2, result.word, {Rational(1), Rational(0)}), y) < eps);
  CHECK(result.error <= result.error_bound * (1 + tol(20)));
}

// In dimension 3 the inner stage must land on a slab whose relative width
// shrinks like 2^-k of the outer stage, so some targets exhaust the budget.
// Every returned word must verify; every failure must be NotFound.
TEST_CASE("steering in dimension 3 on grid targets") {
  PrecisionScope scope(128);
  const auto sys = build_real_example(3);
  const Real eps("0.1");
  const oracle::RVec e1{Rational(1), Rational(0), Rational(0)};
  int found = 0;
  for (const Real y1 : {Real(1), Real("0.5")}) {
    for (const Real y3 : {Real(-1), Real("0.5"), Real(1)}) {
      const Vector<Real> y = vec({y1, Real("-0.5"), y3});
      INFO("y = " << format_real(y1, 3) << ", -0.5, " << format_real(y3, 3));
      try {
        const auto result = synthesize_word(sys, y, eps);
        ++found;
        CHECK(result.error < eps);
        CHECK(result.word.stages.size() <= 3);
        CHECK(sup_error(exact_word(3, result.word, e1), y) < eps);
        CHECK(result.error <= result.error_bound * (1 + tol(20)));
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFound);
      }
    }
  }
  CHECK(found >= 2);
}

TEST_CASE("stage invariant: O^{k,l} z_top lands near (z_{s+1}, 0, ...)") {
  PrecisionScope scope(128);
  const auto sys = build_real_example(3);
  const Vector<Real> y = vec({1, Real("-0.5"), 1});
  const auto result = synthesize_word(sys, y, Real("0.1"));
  const auto a = sys.a();
  const auto b = sys.b();
  int checked = 0;
  for (const auto& st : result.stages) {
    if (st.s == 0 || (st.chosen.k == 0 && st.chosen.l == 0)) continue;
    INFO("stage " << st.s);
    ++checked;
    const Matrix<Real> o = o_matrix(a, b, st.s, st.chosen.k, st.chosen.l);
    Vector<Real> moved = st.target.head(st.s);
    moved(0) += st.shift;
    CHECK(mp::abs(st.shift) < st.budget * 3 / 4);
    const Vector<Real> image = o * moved;
    Real dev = mp::abs(image(0) - st.target(st.s));
    for (Index j = 1; j < image.size(); ++j) dev = std::max(dev, Real(mp::abs(image(j))));
    CHECK(dev < st.budget * 3 / 4);
    // B^k A^l x reproduces the shifted top block exactly.
    const Vector<Real> back = evaluate_word(sys, OrbitWord{{st.chosen}}, st.input);
    for (Index i = 0; i < st.s; ++i) CHECK(mp::abs(back(i) - moved(i)) < tol(60));
  }
  CHECK(checked == 2);
}

TEST_CASE("zero first target coordinate uses the surrogate") {
  PrecisionScope scope(128);
  const auto sys = build_real_example(2);
  const Real eps("1e-2");
  const Vector<Real> y = vec({0, Real("0.5")});
  const auto result = synthesize_word(sys, y, eps);
  CHECK(result.surrogate_first);
  CHECK(result.error < eps);
}

TEST_CASE("steering rejects bad input") {
  PrecisionScope scope(128);
  const auto sys = build_real_example(2);
  const auto bad_seed = sys.with_seed({FieldElement::zero(Field::Real),
                                       FieldElement::from_rational(Rational(1))});
  try {
    synthesize_word(bad_seed, vec({1, 1}), Real("1e-2"));
    FAIL("expected SeedFirstCoordinateZero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SeedFirstCoordinateZero);
  }
  CHECK_THROWS_AS(synthesize_word(sys, vec({1}), Real("1e-2")), Error);
  const SemigroupSystem<Real> raw(sys.a_entries(), sys.b_entries());
  try {
    synthesize_word(raw, vec({1, 1}), Real("1e-2"));
    FAIL("expected NotValidated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotValidated);
  }
}

TEST_CASE("complex steering in dimension 2") {
  PrecisionScope scope(96);
  const auto sys = build_complex_example(2);
  Vector<Complex> y(2);
  y << Complex(Real("0.8"), Real("0.3")), Complex(Real("-0.5"), Real("0.6"));
  const Real eps("5e-2");
  const auto result = synthesize_word(sys, y, eps);
  CHECK(result.error < eps);
  const Vector<Complex> out = evaluate_word(sys, result.word, sys.seed());
  CHECK(norm_inf(Vector<Complex>(out - y)) < eps);
}

TEST_CASE("affine steering") {
  PrecisionScope scope(128);
  const auto sys = build_affine_example();
  const Real eps("1e-2");
  const auto result = steer_affine(sys, vec({0}), vec({4}), eps);
  CHECK(result.error < eps);
  // Independent exact evaluation: l steps of x -> 3x + 1 give
  // 3^l x + (3^l - 1) / 2, k steps of x -> -x/2 give (-1/2)^k x.
  Rational x(0);
  for (auto it = result.word.stages.rbegin(); it != result.word.stages.rend(); ++it) {
    const Rational three = oracle::rational_pow(Rational(3), static_cast<std::uint64_t>(it->l));
    x = three * x + (three - 1) / 2;
    x *= oracle::rational_pow(Rational(-1, 2), static_cast<std::uint64_t>(it->k));
  }
  CHECK(mp::abs(to_real(x) - 4) < eps);
}

TEST_CASE("lift is a homomorphism on the affine generators") {
  PrecisionScope scope(128);
  const auto sys = build_affine_example();
  const auto lifted = lift_affine(sys);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    OrbitWord word;
    for (int i = 0; i < 3; ++i) {
      word.stages.push_back({static_cast<std::int64_t>(rng() % 4),
                             static_cast<std::int64_t>(rng() % 4)});
    }
    const Vector<Real> p = vec({Real(static_cast<long>(rng() % 200) - 100) / 7});
    const Vector<Real> direct = apply_affine_word(sys, word, p);
    const Vector<Real> via = phi<Real>(evaluate_word(lifted, word, psi(p)));
    CHECK(mp::abs(direct(0) - via(0)) < tol(80));
  }
}
