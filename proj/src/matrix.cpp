#include "hyperorbit/matrix.hpp"

#include <string>

namespace hyperorbit {

namespace {

template <class S>
S zero_value() {
  return S(0);
}

// sum_{j in [begin, end)} row(j) * x(j), largest terms first
template <class S, class Row>
S ordered_dot(const Row& row, const Vector<S>& x, Index begin, Index end) {
  std::vector<S> terms;
  terms.reserve(static_cast<std::size_t>(end - begin));
  for (Index j = begin; j < end; ++j) {
    if (is_zero(row(j)) || is_zero(x(j))) continue;
    terms.push_back(row(j) * x(j));
  }
  return ordered_sum(std::move(terms));
}

template <class S>
Vector<S> forward_substitute(const Matrix<S>& m, const Vector<S>& rhs) {
  const Index n = m.rows();
  Vector<S> x(n);
  for (Index i = 0; i < n; ++i) {
    std::vector<S> terms;
    terms.reserve(static_cast<std::size_t>(i + 1));
    terms.push_back(rhs(i));
    for (Index j = 0; j < i; ++j) {
      if (is_zero(m(i, j)) || is_zero(x(j))) continue;
      terms.push_back(-(m(i, j) * x(j)));
    }
    x(i) = ordered_sum(std::move(terms)) / m(i, i);
  }
  return x;
}

template <class S>
Vector<S> lower_multiply(const Matrix<S>& m, const Vector<S>& x) {
  const Index n = m.rows();
  Vector<S> y(n);
  for (Index i = 0; i < n; ++i) y(i) = ordered_dot<S>(m.row(i), x, 0, i + 1);
  return y;
}

template <class S>
Matrix<S> dense_product(const Matrix<S>& a, const Matrix<S>& b) {
  Matrix<S> out(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.cols(); ++j) {
      std::vector<S> terms;
      for (Index t = 0; t < a.cols(); ++t) {
        if (is_zero(a(i, t)) || is_zero(b(t, j))) continue;
        terms.push_back(a(i, t) * b(t, j));
      }
      out(i, j) = ordered_sum(std::move(terms));
    }
  }
  return out;
}

template <class S>
Vector<S> unit_vector(Index n, Index i) {
  Vector<S> e(n);
  for (Index t = 0; t < n; ++t) e(t) = zero_value<S>();
  e(i) = S(1);
  return e;
}

}  // namespace

template <class S>
LowerTriangular<S>::LowerTriangular(Matrix<S> dense) : dense_(std::move(dense)) {
  if (dense_.rows() != dense_.cols() || dense_.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "lower-triangular matrix must be square and nonempty");
  }
  for (Index i = 0; i < dense_.rows(); ++i) {
    if (is_zero(dense_(i, i))) {
      throw Error(ErrorCode::InvalidArgument, "zero diagonal entry at " + std::to_string(i + 1));
    }
    for (Index j = i + 1; j < dense_.cols(); ++j) {
      if (!is_zero(dense_(i, j))) {
        throw Error(ErrorCode::InvalidArgument, "matrix is not lower triangular");
      }
    }
  }
}

template <class S>
Vector<S> LowerTriangular<S>::multiply(const Vector<S>& x) const {
  if (x.size() != n()) throw Error(ErrorCode::DimensionMismatch, "vector length");
  return lower_multiply(dense_, x);
}

template <class S>
Vector<S> LowerTriangular<S>::solve(const Vector<S>& x) const {
  if (x.size() != n()) throw Error(ErrorCode::DimensionMismatch, "vector length");
  return forward_substitute(dense_, x);
}

template <class S>
LowerTriangular<S> LowerTriangular<S>::leading(Index s) const {
  return LowerTriangular(dense_.topLeftCorner(s, s));
}

template <class S>
LowerTriangular<S> LowerTriangular<S>::trailing(Index s) const {
  return LowerTriangular(dense_.bottomRightCorner(n() - s, n() - s));
}

template <class S>
Diagonal<S>::Diagonal(Vector<S> entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0) throw Error(ErrorCode::DimensionMismatch, "empty diagonal");
  for (Index i = 0; i < entries_.size(); ++i) {
    if (is_zero(entries_(i))) {
      throw Error(ErrorCode::InvalidArgument, "zero diagonal entry at " + std::to_string(i + 1));
    }
  }
}

template <class S>
Matrix<S> Diagonal<S>::dense() const {
  Matrix<S> m(n(), n());
  for (Index i = 0; i < n(); ++i) {
    for (Index j = 0; j < n(); ++j) m(i, j) = i == j ? entries_(i) : zero_value<S>();
  }
  return m;
}

template <class S>
Diagonal<S> Diagonal<S>::leading(Index s) const {
  return Diagonal(entries_.head(s));
}

template <class S>
Diagonal<S> Diagonal<S>::trailing(Index s) const {
  return Diagonal(entries_.tail(n() - s));
}

template <class S>
Vector<S> mat_pow_apply(const LowerTriangular<S>& a, std::int64_t l, const Vector<S>& x) {
  if (x.size() != a.n()) throw Error(ErrorCode::DimensionMismatch, "vector length");
  Vector<S> y = x;
  const std::int64_t steps = l < 0 ? -l : l;
  for (std::int64_t t = 0; t < steps; ++t) y = l > 0 ? a.multiply(y) : a.solve(y);
  return y;
}

template <class S>
Vector<S> mat_pow_apply(const Diagonal<S>& b, std::int64_t k, const Vector<S>& x) {
  if (x.size() != b.n()) throw Error(ErrorCode::DimensionMismatch, "vector length");
  const std::uint64_t steps = static_cast<std::uint64_t>(k < 0 ? -k : k);
  Vector<S> y(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const S power = int_pow(b(i), steps);
    y(i) = k >= 0 ? S(x(i) * power) : S(x(i) / power);
  }
  return y;
}

template <class S>
Matrix<S> mat_pow(const LowerTriangular<S>& a, std::int64_t l) {
  Matrix<S> out(a.n(), a.n());
  for (Index j = 0; j < a.n(); ++j) out.col(j) = mat_pow_apply(a, l, unit_vector<S>(a.n(), j));
  return out;
}

template <class S>
void require_increasing_diagonal(const LowerTriangular<S>& a) {
  for (Index i = 0; i + 1 < a.n(); ++i) {
    if (!(magnitude(a.diag(i)) < magnitude(a.diag(i + 1)))) {
      throw Error(ErrorCode::SpectralOrderViolation,
                  "|A_" + std::to_string(i + 1) + "| < |A_" + std::to_string(i + 2) + "| fails");
    }
  }
}

template <class S>
BoundCertificate growth_lambda(const LowerTriangular<S>& a) {
  require_increasing_diagonal(a);
  BoundCertificate cert;
  cert.lambda = Real(1);
  const Index n = a.n();
  for (Index p = n - 2; p >= 0; --p) {
    const LowerTriangular<S> inner = a.trailing(p + 1);
    Vector<S> c(n - p - 1);
    for (Index t = 0; t < c.size(); ++t) c(t) = a(p + 1 + t, p);
    const Vector<S> reduced = inner.solve(c);

    GrowthStep step;
    step.block_start = p;
    step.lambda_inner = cert.lambda;
    step.column_sum = norm_1(c);
    step.inverse_column_sum = norm_1(reduced);
    step.gap = magnitude(a.diag(p + 1)) - magnitude(a.diag(p));
    Real lambda = std::max(Real(1), step.lambda_inner);
    lambda = std::max(lambda, Real(step.column_sum * step.lambda_inner / step.gap));
    lambda = std::max(lambda, Real(step.lambda_inner * magnitude(a.diag(p + 1)) *
                                   step.inverse_column_sum / step.gap));
    step.lambda = lambda;
    cert.lambda = lambda;
    cert.trace.push_back(step);
  }
  return cert;
}

template <class S>
LimitMatrix<S> normalized_inverse_limit(const LowerTriangular<S>& a) {
  require_increasing_diagonal(a);
  const Index n = a.n();
  const S a1 = a.diag(0);
  Matrix<S> normalized(n, n);
  for (Index j = 0; j < n; ++j) {
    normalized.col(j) = a.solve(unit_vector<S>(n, j)) * a1;
  }
  LimitMatrix<S> out;
  out.F = normalized.bottomRightCorner(n - 1, n - 1);
  out.H = normalized.bottomLeftCorner(n - 1, 1);
  Matrix<S> shifted = -out.F;
  for (Index i = 0; i < n - 1; ++i) shifted(i, i) += S(1);
  out.limit_col = forward_substitute(shifted, out.H);
  out.full_limit = Matrix<S>(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) out.full_limit(i, j) = zero_value<S>();
  }
  out.full_limit(0, 0) = S(1);
  for (Index i = 1; i < n; ++i) out.full_limit(i, 0) = out.limit_col(i - 1);
  out.rate = n > 1 ? Real(magnitude(a1) / magnitude(a.diag(1))) : Real(0);
  const Real lambda = growth_lambda(a).lambda;
  out.C = lambda * std::max(Real(1), norm_1(out.limit_col));
  return out;
}

template <class S>
ConditionColumn<S> condition_ii(const LowerTriangular<S>& a, const Real& tau_zero) {
  const Index n = a.n();
  const S a1 = a.diag(0);
  Matrix<S> shifted = a.dense() / a1;
  for (Index i = 0; i < n; ++i) shifted(i, i) -= S(1);
  shifted(0, 0) += S(1);
  for (Index i = 1; i < n; ++i) {
    if (is_zero(shifted(i, i))) {
      throw Error(ErrorCode::SpectralOrderViolation, "A_1^{-1} A - I + Delta is singular");
    }
  }
  ConditionColumn<S> out;
  out.col = forward_substitute(shifted, unit_vector<S>(n, 0));
  out.ok = true;
  for (Index i = 0; i < n; ++i) out.ok = out.ok && magnitude(out.col(i)) > tau_zero;
  return out;
}

template <class S>
Matrix<S> o_matrix(const LowerTriangular<S>& a, const Diagonal<S>& b, Index s, std::int64_t k,
                   std::int64_t l) {
  const Index n = a.n();
  if (b.n() != n) throw Error(ErrorCode::DimensionMismatch, "A and B sizes differ");
  if (s < 1 || s >= n) {
    throw Error(ErrorCode::StageOutOfRange,
                "stage " + std::to_string(s) + " outside [1, " + std::to_string(n - 1) + "]");
  }
  Matrix<S> bottom(n - s, s);
  for (Index j = 0; j < s; ++j) {
    const Vector<S> image = mat_pow_apply(b, k, mat_pow_apply(a, l, unit_vector<S>(n, j)));
    bottom.col(j) = image.tail(n - s);
  }
  Matrix<S> out = dense_product(bottom, mat_pow(a.leading(s), -l));
  for (Index j = 0; j < s; ++j) {
    const S scale = int_pow(b(j), static_cast<std::uint64_t>(k < 0 ? -k : k));
    for (Index i = 0; i < n - s; ++i) {
      out(i, j) = k >= 0 ? S(out(i, j) / scale) : S(out(i, j) * scale);
    }
  }
  return out;
}

template <class S>
Real norm_inf(const Matrix<S>& m) {
  Real best(0);
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<Real> row;
    for (Index j = 0; j < m.cols(); ++j) row.push_back(magnitude(m(i, j)));
    best = std::max(best, ordered_sum(std::move(row)));
  }
  return best;
}

template <class S>
Real norm_max(const Matrix<S>& m) {
  Real best(0);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) best = std::max(best, magnitude(m(i, j)));
  }
  return best;
}

template <class S>
Real norm_1(const Vector<S>& v) {
  std::vector<Real> terms;
  for (Index i = 0; i < v.size(); ++i) terms.push_back(magnitude(v(i)));
  return ordered_sum(std::move(terms));
}

template <class S>
Real norm_inf(const Vector<S>& v) {
  Real best(0);
  for (Index i = 0; i < v.size(); ++i) best = std::max(best, magnitude(v(i)));
  return best;
}

#define HYPERORBIT_INSTANTIATE(S)                                                             \
  template class LowerTriangular<S>;                                                          \
  template class Diagonal<S>;                                                                 \
  template Vector<S> mat_pow_apply(const LowerTriangular<S>&, std::int64_t, const Vector<S>&); \
  template Vector<S> mat_pow_apply(const Diagonal<S>&, std::int64_t, const Vector<S>&);        \
  template Matrix<S> mat_pow(const LowerTriangular<S>&, std::int64_t);                         \
  template void require_increasing_diagonal(const LowerTriangular<S>&);                        \
  template BoundCertificate growth_lambda(const LowerTriangular<S>&);                          \
  template LimitMatrix<S> normalized_inverse_limit(const LowerTriangular<S>&);                 \
  template ConditionColumn<S> condition_ii(const LowerTriangular<S>&, const Real&);            \
  template Matrix<S> o_matrix(const LowerTriangular<S>&, const Diagonal<S>&, Index,            \
                              std::int64_t, std::int64_t);                                     \
  template Real norm_inf(const Matrix<S>&);                                                    \
  template Real norm_max(const Matrix<S>&);                                                    \
  template Real norm_1(const Vector<S>&);                                                      \
  template Real norm_inf(const Vector<S>&);

HYPERORBIT_INSTANTIATE(Real)
HYPERORBIT_INSTANTIATE(Complex)

#undef HYPERORBIT_INSTANTIATE

}  // namespace hyperorbit
