#pragma once

#include "hyperorbit/numeric.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <vector>

namespace hyperorbit {

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Square lower-triangular matrix with nonzero diagonal.
template <class S>
class LowerTriangular {
 public:
  explicit LowerTriangular(Matrix<S> dense);

  Index n() const { return dense_.rows(); }
  const Matrix<S>& dense() const { return dense_; }
  const S& operator()(Index i, Index j) const { return dense_(i, j); }
  /// Diagonal entry A_i (0-based).
  const S& diag(Index i) const { return dense_(i, i); }

  Vector<S> multiply(const Vector<S>& x) const;
  /// A^{-1} x by forward substitution.
  Vector<S> solve(const Vector<S>& x) const;

  /// Leading s x s block.
  LowerTriangular leading(Index s) const;
  /// Trailing (n - s) x (n - s) block.
  LowerTriangular trailing(Index s) const;

 private:
  Matrix<S> dense_;
};

template <class S>
class Diagonal {
 public:
  explicit Diagonal(Vector<S> entries);

  Index n() const { return entries_.size(); }
  const Vector<S>& entries() const { return entries_; }
  const S& operator()(Index i) const { return entries_(i); }
  Matrix<S> dense() const;

  Diagonal leading(Index s) const;
  Diagonal trailing(Index s) const;

 private:
  Vector<S> entries_;
};

/// A^l x; negative l applies A^{-|l|} by repeated forward substitution.
/// Every inner product is summed in decreasing order of magnitude.
template <class S>
Vector<S> mat_pow_apply(const LowerTriangular<S>& a, std::int64_t l, const Vector<S>& x);
template <class S>
Vector<S> mat_pow_apply(const Diagonal<S>& b, std::int64_t k, const Vector<S>& x);

/// Dense A^l (negative l for inverse powers).
template <class S>
Matrix<S> mat_pow(const LowerTriangular<S>& a, std::int64_t l);

/// Throws SpectralOrderViolation unless 0 < |A_1| < ... < |A_n|.
template <class S>
void require_increasing_diagonal(const LowerTriangular<S>& a);

/// One step of the growth bound recursion, outermost block last.
struct GrowthStep {
  Index block_start = 0;  // 0-based index of the block's first row
  Real lambda_inner;      // bound of the trailing block
  Real column_sum;        // sum of |A_{k1}| below the block's corner
  Real inverse_column_sum;  // sum of |(D^{-1} C)_k|
  Real gap;               // |A_2| - |A_1| inside the block
  Real lambda;
};

/// |(A^l)_{ij}| <= lambda |A_i|^l and |(A^{-l})_{ij}| <= lambda |A_j|^{-l} for all l >= 1.
struct BoundCertificate {
  Real lambda;
  std::vector<GrowthStep> trace;
};

template <class S>
BoundCertificate growth_lambda(const LowerTriangular<S>& a);

/// Limit of (A_1 A^{-1})^l and its block data.
template <class S>
struct LimitMatrix {
  Matrix<S> F;           // trailing (n-1) x (n-1) block of A_1 A^{-1}
  Vector<S> H;           // first column below the corner
  Vector<S> limit_col;   // (I - F)^{-1} H
  Matrix<S> full_limit;  // first column (1, limit_col), zeros elsewhere
  Real rate;             // |A_1 / A_2| (0 when n = 1)
  Real C;                // ||(A_1 A^{-1})^l - full_limit||_max <= C rate^l
};

template <class S>
LimitMatrix<S> normalized_inverse_limit(const LowerTriangular<S>& a);

inline Real default_tau_zero() { return parse_real(current_tolerances().tau_zero); }

template <class S>
struct ConditionColumn {
  Vector<S> col;
  bool ok = false;
};

/// First column of (A_1^{-1} A - I + Delta)^{-1}, Delta = e_1 e_1^T, and whether
/// every entry exceeds tau_zero in modulus.
template <class S>
ConditionColumn<S> condition_ii(const LowerTriangular<S>& a, const Real& tau_zero);
template <class S>
ConditionColumn<S> condition_ii(const LowerTriangular<S>& a) {
  return condition_ii(a, default_tau_zero());
}

/// O^{k,l} for stage s: the bottom n - s rows of B^k A^l [I_s; 0], right-multiplied by
/// S^{-l} U^{-k}, where S and U are the leading s x s blocks of A and B.
template <class S>
Matrix<S> o_matrix(const LowerTriangular<S>& a, const Diagonal<S>& b, Index s, std::int64_t k,
                   std::int64_t l);

/// Maximum absolute row sum.
template <class S>
Real norm_inf(const Matrix<S>& m);
template <class S>
Real norm_max(const Matrix<S>& m);
template <class S>
Real norm_1(const Vector<S>& v);
template <class S>
Real norm_inf(const Vector<S>& v);

}  // namespace hyperorbit
