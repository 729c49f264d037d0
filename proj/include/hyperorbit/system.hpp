#pragma once

#include "hyperorbit/generating_pair.hpp"
#include "hyperorbit/matrix.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hyperorbit {

using ElementMatrix = std::vector<std::vector<FieldElement>>;
using ElementVector = std::vector<FieldElement>;

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  bool accepted = false;
  std::vector<CheckResult> checks;
  /// Certified pairs in check order: (B_1, A_1) then the ratio (or diagonal) pairs.
  std::vector<GeneratingPair> pairs;
  /// Condition (ii) column (linear systems) or (A - I)^{-1} v (affine), rectangular decimals.
  std::vector<std::string> column;

  std::vector<std::string> reasons() const;
  void add(std::string name, bool passed, std::string detail = {});
};

/// -1, 0, +1 comparing |x| with |y|; exact when both moduli are exact rationals.
int compare_modulus(const FieldElement& x, const FieldElement& y);

/// Conditions (i) and (ii) for the pair (A lower triangular, B diagonal).
ValidationReport validate_theorem1(const ElementMatrix& a, const ElementVector& b);

/// Affine pair x -> A x + v, x -> B x: diagonal orderings, the chain
/// (B_n, A_n) < ... < (B_1, A_1) and nonzero entries of (A - I)^{-1} v.
/// Throws SingularAminusI when A - I is singular.
ValidationReport validate_theorem2(const ElementMatrix& a, const ElementVector& v,
                                   const ElementVector& b);

/// Linear pair (A, B) acting on K^n, with a seed vector.
template <class S>
class SemigroupSystem {
 public:
  SemigroupSystem(ElementMatrix a, ElementVector b, ElementVector seed = {});

  static constexpr Field field() { return field_of_v<S>; }
  Index n() const { return static_cast<Index>(b_.size()); }

  const ElementMatrix& a_entries() const { return a_; }
  const ElementVector& b_entries() const { return b_; }
  const ElementVector& seed_entries() const { return seed_; }

  /// Dense objects rebuilt at the working precision.
  LowerTriangular<S> a() const;
  Diagonal<S> b() const;
  Vector<S> seed() const;

  /// Copy carrying a fresh validation report.
  SemigroupSystem validated() const;
  SemigroupSystem with_seed(ElementVector seed) const;
  const std::optional<ValidationReport>& validation() const { return validation_; }
  bool accepted() const { return validation_ && validation_->accepted; }

  std::map<std::string, std::string> metadata;

 private:
  ElementMatrix a_;
  ElementVector b_;
  ElementVector seed_;
  std::optional<ValidationReport> validation_;
};

/// x -> A x + v and x -> B x on K^n (A lower triangular, B diagonal).
template <class S>
class AffineSystem {
 public:
  AffineSystem(ElementMatrix a, ElementVector v, ElementVector b);

  static constexpr Field field() { return field_of_v<S>; }
  Index n() const { return static_cast<Index>(b_.size()); }

  const ElementMatrix& a_entries() const { return a_; }
  const ElementVector& v_entries() const { return v_; }
  const ElementVector& b_entries() const { return b_; }

  Matrix<S> a() const;
  Vector<S> v() const;
  Diagonal<S> b() const;

  AffineSystem validated() const;
  const std::optional<ValidationReport>& validation() const { return validation_; }
  bool accepted() const { return validation_ && validation_->accepted; }

  std::map<std::string, std::string> metadata;

 private:
  ElementMatrix a_;
  ElementVector v_;
  ElementVector b_;
  std::optional<ValidationReport> validation_;
};

/// A_k = 3^k, A_{k1} = 3 (k >= 2), B_1 = -1/2, B_k = 2^{-k^2}; seed e_1.
SemigroupSystem<Real> build_real_example(int n);
/// Same A; B_k = (e^i / 2)^{k^2}.
SemigroupSystem<Complex> build_complex_example(int n);

/// A = [3], v = [1], B = [-1/2].
AffineSystem<Real> build_affine_example();

/// Lifted pair A' = [[a, 0], [a v, a A]], B' = diag(b, b B) on K^{n+1}.
/// Defaults: b = B_1, a = A_1^2. Throws PrecViolation unless (B_1, A_1) < (b, a).
template <class S>
SemigroupSystem<S> lift_affine(const AffineSystem<S>& sys, std::optional<FieldElement> a = {},
                               std::optional<FieldElement> b = {});

/// (y_2 / y_1, ..., y_{n+1} / y_1). Throws ZeroFirstCoordinate.
template <class S>
Vector<S> phi(const Vector<S>& y);
/// (1, x_1, ..., x_n).
template <class S>
Vector<S> psi(const Vector<S>& x);

struct QuadrantParameters {
  Rational a{3};
  Rational b{1};
  Rational d{9};
  Rational u{1, 2};
  Rational v{1, 16};
};

/// A = [[a, 0], [b, d]], B = diag(u, v), seed (1, 1). The report checks
/// d > a > 1 > u > v > 0, b > 0 and that (-v, d) < (-u, a) are certified pairs.
std::pair<SemigroupSystem<Real>, ValidationReport> build_quadrant_example(
    const QuadrantParameters& params = {});

}  // namespace hyperorbit
