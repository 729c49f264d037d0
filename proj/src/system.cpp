#include "hyperorbit/system.hpp"

#include <algorithm>
#include <sstream>

namespace hyperorbit {

namespace {

constexpr unsigned kReportDigits = 40;

std::string idx(Index i) { return std::to_string(i + 1); }

std::string format_scalar(const Real& x) { return format_real(x, kReportDigits); }
std::string format_scalar(const Complex& z) {
  return format_real(z.real(), kReportDigits) + ":" + format_real(z.imag(), kReportDigits);
}

Field field_of_entries(const ElementMatrix& a, const ElementVector& b) {
  for (const auto& row : a)
    for (const auto& x : row)
      if (x.field() == Field::Complex) return Field::Complex;
  for (const auto& x : b)
    if (x.field() == Field::Complex) return Field::Complex;
  return Field::Real;
}

const FieldElement& one() {
  static const FieldElement value = FieldElement::from_rational(Rational(1));
  return value;
}

template <class S>
Matrix<S> dense_of(const ElementMatrix& a) {
  const Index n = static_cast<Index>(a.size());
  Matrix<S> m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = a[i][j].to<S>();
  return m;
}

template <class S>
Vector<S> vector_of(const ElementVector& v) {
  Vector<S> out(static_cast<Index>(v.size()));
  for (Index i = 0; i < out.size(); ++i) out(i) = v[static_cast<std::size_t>(i)].template to<S>();
  return out;
}

template <class S>
void record_condition_ii(const ElementMatrix& a, ValidationReport& report) {
  try {
    const auto cond = condition_ii(LowerTriangular<S>(dense_of<S>(a)));
    std::ostringstream detail;
    for (Index i = 0; i < cond.col.size(); ++i) {
      report.column.push_back(format_scalar(cond.col(i)));
      if (!(magnitude(cond.col(i)) > default_tau_zero())) {
        detail << "entry " << idx(i) << " of the first column vanishes";
        break;
      }
    }
    report.add("condition (ii): first column of (A_1^{-1} A - I + Delta)^{-1} nonzero", cond.ok,
               detail.str());
  } catch (const Error& e) {
    report.add("condition (ii): first column of (A_1^{-1} A - I + Delta)^{-1} nonzero", false,
               e.what());
  }
}

// Shape checks shared by both validators; false when later checks cannot run.
bool check_shape(const ElementMatrix& a, const ElementVector& b, ValidationReport& report) {
  const std::size_t n = b.size();
  bool square = n > 0 && a.size() == n;
  for (const auto& row : a) square = square && row.size() == n;
  report.add("shape: A is n x n and B has n entries", square);
  if (!square) return false;
  bool lower = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) lower = lower && a[i][j].is_zero();
  report.add("A is lower triangular", lower);
  return lower;
}

void check_modulus_chain(const ElementMatrix& a, const ElementVector& b, ValidationReport& report) {
  const Index n = static_cast<Index>(b.size());
  report.add("|B_" + idx(n - 1) + "| > 0", !b.back().is_zero());
  for (Index j = n - 2; j >= 0; --j) {
    report.add("|B_" + idx(j + 1) + "| < |B_" + idx(j) + "|",
               compare_modulus(b[j + 1], b[j]) < 0);
  }
  report.add("|B_1| < 1", compare_modulus(b[0], one()) < 0);
  report.add("1 < |A_1|", compare_modulus(one(), a[0][0]) < 0);
  for (Index j = 0; j + 1 < n; ++j) {
    report.add("|A_" + idx(j) + "| < |A_" + idx(j + 1) + "|",
               compare_modulus(a[j][j], a[j + 1][j + 1]) < 0);
  }
}

void add_certificate(const std::string& label, const GeneratingPair& pair,
                     ValidationReport& report) {
  report.pairs.push_back(pair);
  report.add("generating " + label, pair.certified(),
             std::string(to_string(pair.certificate)) + ": " + pair.reason);
}

void add_prec(const std::string& lhs, const GeneratingPair& p, const std::string& rhs,
              const GeneratingPair& q, ValidationReport& report) {
  const PrecOrder order = prec_compare(p, q);
  report.add("prec " + lhs + " < " + rhs, order.outcome == PrecOutcome::Less, order.reason);
}

bool nonzero_diagonals(const ElementMatrix& a, const ElementVector& b) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (a[i][i].is_zero() || b[i].is_zero()) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> ValidationReport::reasons() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.detail.empty() ? c.name + " violated" : c.name + " violated (" + c.detail + ")");
  }
  return out;
}

void ValidationReport::add(std::string name, bool passed, std::string detail) {
  checks.push_back({std::move(name), passed, std::move(detail)});
  accepted = true;
  for (const auto& c : checks) accepted = accepted && c.passed;
}

int compare_modulus(const FieldElement& x, const FieldElement& y) {
  if (x.exact_modulus() && y.exact_modulus()) {
    if (*x.exact_modulus() < *y.exact_modulus()) return -1;
    return *x.exact_modulus() > *y.exact_modulus() ? 1 : 0;
  }
  if (x.is_zero() || y.is_zero()) return x.is_zero() == y.is_zero() ? 0 : (x.is_zero() ? -1 : 1);
  if (x.log_mag() < y.log_mag()) return -1;
  return x.log_mag() > y.log_mag() ? 1 : 0;
}

ValidationReport validate_theorem1(const ElementMatrix& a, const ElementVector& b) {
  ValidationReport report;
  if (!check_shape(a, b, report)) return report;
  const Index n = static_cast<Index>(b.size());
  check_modulus_chain(a, b, report);
  if (!nonzero_diagonals(a, b)) {
    report.add("nonzero diagonals", false);
    return report;
  }

  std::vector<GeneratingPair> chain;
  chain.push_back(certify_generating(b[0], a[0][0]));
  add_certificate("(B_1, A_1)", chain.back(), report);
  auto label = [](Index j) {
    return j == 0 ? std::string("(B_1, A_1)")
                  : "(B_" + idx(j) + "/B_1, A_" + idx(j) + "/A_1)";
  };
  for (Index j = 1; j < n; ++j) {
    chain.push_back(certify_generating(b[j] / b[0], a[j][j] / a[0][0]));
    add_certificate(label(j), chain.back(), report);
  }
  for (Index j = n - 1; j >= 1; --j) add_prec(label(j), chain[j], label(j - 1), chain[j - 1], report);

  if (field_of_entries(a, b) == Field::Complex) {
    record_condition_ii<Complex>(a, report);
  } else {
    record_condition_ii<Real>(a, report);
  }
  return report;
}

ValidationReport validate_theorem2(const ElementMatrix& a, const ElementVector& v,
                                   const ElementVector& b) {
  ValidationReport report;
  if (!check_shape(a, b, report)) return report;
  const Index n = static_cast<Index>(b.size());
  report.add("v has n entries", v.size() == b.size());
  if (v.size() != b.size()) return report;
  check_modulus_chain(a, b, report);
  if (!nonzero_diagonals(a, b)) {
    report.add("nonzero diagonals", false);
    return report;
  }

  std::vector<GeneratingPair> pairs;
  auto label = [](Index j) { return "(B_" + idx(j) + ", A_" + idx(j) + ")"; };
  for (Index j = 0; j < n; ++j) {
    pairs.push_back(certify_generating(b[j], a[j][j]));
    add_certificate(label(j), pairs.back(), report);
  }
  for (Index j = n - 1; j >= 1; --j) add_prec(label(j), pairs[j], label(j - 1), pairs[j - 1], report);

  auto solve = [&](auto tag) {
    using S = decltype(tag);
    Matrix<S> shifted = dense_of<S>(a);
    for (Index i = 0; i < n; ++i) shifted(i, i) -= S(1);
    for (Index i = 0; i < n; ++i) {
      if (is_zero(shifted(i, i))) {
        throw Error(ErrorCode::SingularAminusI, "A - I is singular at row " + idx(i));
      }
    }
    const Vector<S> w = LowerTriangular<S>(shifted).solve(vector_of<S>(v));
    bool ok = true;
    std::string detail;
    for (Index i = 0; i < n; ++i) {
      report.column.push_back(format_scalar(w(i)));
      if (ok && !(magnitude(w(i)) > default_tau_zero())) {
        ok = false;
        detail = "entry " + idx(i) + " vanishes";
      }
    }
    report.add("(A - I)^{-1} v has nonzero entries", ok, detail);
  };
  const bool complex = field_of_entries(a, b) == Field::Complex ||
                       std::any_of(v.begin(), v.end(),
                                   [](const FieldElement& x) { return x.field() == Field::Complex; });
  if (complex) {
    solve(Complex());
  } else {
    solve(Real());
  }
  return report;
}

template <class S>
SemigroupSystem<S>::SemigroupSystem(ElementMatrix a, ElementVector b, ElementVector seed)
    : a_(std::move(a)), b_(std::move(b)), seed_(std::move(seed)) {
  const std::size_t n = b_.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "system dimension must be at least 1");
  if (a_.size() != n) throw Error(ErrorCode::DimensionMismatch, "A must be n x n");
  for (auto& row : a_) {
    if (row.size() != n) throw Error(ErrorCode::DimensionMismatch, "A must be n x n");
    for (auto& x : row) x = x.as_field(field());
  }
  for (auto& x : b_) x = x.as_field(field());
  if (seed_.empty()) {
    seed_.assign(n, FieldElement::zero(field()));
    seed_[0] = FieldElement::from_rational(Rational(1), field());
  }
  if (seed_.size() != n) throw Error(ErrorCode::DimensionMismatch, "seed must have n entries");
  for (auto& x : seed_) x = x.as_field(field());
}

template <class S>
LowerTriangular<S> SemigroupSystem<S>::a() const {
  return LowerTriangular<S>(dense_of<S>(a_));
}

template <class S>
Diagonal<S> SemigroupSystem<S>::b() const {
  return Diagonal<S>(vector_of<S>(b_));
}

template <class S>
Vector<S> SemigroupSystem<S>::seed() const {
  return vector_of<S>(seed_);
}

template <class S>
SemigroupSystem<S> SemigroupSystem<S>::validated() const {
  SemigroupSystem copy = *this;
  copy.validation_ = validate_theorem1(a_, b_);
  return copy;
}

template <class S>
SemigroupSystem<S> SemigroupSystem<S>::with_seed(ElementVector seed) const {
  SemigroupSystem copy(a_, b_, std::move(seed));
  copy.metadata = metadata;
  copy.validation_ = validation_;
  return copy;
}

template <class S>
AffineSystem<S>::AffineSystem(ElementMatrix a, ElementVector v, ElementVector b)
    : a_(std::move(a)), v_(std::move(v)), b_(std::move(b)) {
  const std::size_t n = b_.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "system dimension must be at least 1");
  if (a_.size() != n || v_.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "A must be n x n and v must have n entries");
  }
  for (auto& row : a_) {
    if (row.size() != n) throw Error(ErrorCode::DimensionMismatch, "A must be n x n");
    for (auto& x : row) x = x.as_field(field());
  }
  for (auto& x : v_) x = x.as_field(field());
  for (auto& x : b_) x = x.as_field(field());
}

template <class S>
Matrix<S> AffineSystem<S>::a() const {
  return dense_of<S>(a_);
}

template <class S>
Vector<S> AffineSystem<S>::v() const {
  return vector_of<S>(v_);
}

template <class S>
Diagonal<S> AffineSystem<S>::b() const {
  return Diagonal<S>(vector_of<S>(b_));
}

template <class S>
AffineSystem<S> AffineSystem<S>::validated() const {
  AffineSystem copy = *this;
  copy.validation_ = validate_theorem2(a_, v_, b_);
  return copy;
}

namespace {

template <class S>
void fill_example_a(ElementMatrix& a, int n) {
  const Field field = field_of_v<S>;
  a.assign(static_cast<std::size_t>(n), ElementVector(static_cast<std::size_t>(n), FieldElement::zero(field)));
  Integer power = 1;
  for (int k = 0; k < n; ++k) {
    power *= 3;
    a[k][k] = FieldElement::from_rational(Rational(power), field);
    if (k > 0) a[k][0] = FieldElement::from_rational(Rational(3), field);
  }
}

Rational two_to_minus(int e) {
  Integer den = 1;
  den <<= static_cast<unsigned>(e);
  return Rational(Integer(1), den);
}

}  // namespace

SemigroupSystem<Real> build_real_example(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  ElementMatrix a;
  fill_example_a<Real>(a, n);
  ElementVector b;
  for (int k = 1; k <= n; ++k) {
    b.push_back(FieldElement::from_rational(k == 1 ? Rational(-1, 2) : two_to_minus(k * k)));
  }
  SemigroupSystem<Real> sys(std::move(a), std::move(b));
  sys.metadata["family"] = "real-example";
  sys.metadata["n"] = std::to_string(n);
  return sys.validated();
}

SemigroupSystem<Complex> build_complex_example(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  ElementMatrix a;
  fill_example_a<Complex>(a, n);
  ElementVector b;
  for (int k = 1; k <= n; ++k) {
    b.push_back(FieldElement::from_modulus_arg(two_to_minus(k * k), Real(k * k)));
  }
  SemigroupSystem<Complex> sys(std::move(a), std::move(b));
  sys.metadata["family"] = "complex-example";
  sys.metadata["n"] = std::to_string(n);
  return sys.validated();
}

AffineSystem<Real> build_affine_example() {
  AffineSystem<Real> sys({{FieldElement::from_rational(Rational(3))}},
                         {FieldElement::from_rational(Rational(1))},
                         {FieldElement::from_rational(Rational(-1, 2))});
  sys.metadata["family"] = "affine-1d";
  return sys.validated();
}

template <class S>
SemigroupSystem<S> lift_affine(const AffineSystem<S>& sys, std::optional<FieldElement> a,
                               std::optional<FieldElement> b) {
  const Field field = field_of_v<S>;
  const auto& av = sys.a_entries();
  const auto& bv = sys.b_entries();
  const FieldElement a_lift = a ? a->as_field(field) : av[0][0].pow(2);
  const FieldElement b_lift = b ? b->as_field(field) : bv[0];
  const GeneratingPair inner = certify_generating(bv[0], av[0][0]);
  const GeneratingPair outer = certify_generating(b_lift, a_lift);
  const PrecOrder order = prec_compare(inner, outer);
  if (order.outcome != PrecOutcome::Less) {
    throw Error(ErrorCode::PrecViolation,
                "(B_1, A_1) < (b, a) fails: " + std::string(to_string(order.outcome)) + ", " +
                    order.reason);
  }
  const std::size_t n = bv.size();
  ElementMatrix lifted(n + 1, ElementVector(n + 1, FieldElement::zero(field)));
  ElementVector lifted_b(n + 1, FieldElement::zero(field));
  lifted[0][0] = a_lift;
  lifted_b[0] = b_lift;
  for (std::size_t i = 0; i < n; ++i) {
    lifted[i + 1][0] = a_lift * sys.v_entries()[i];
    for (std::size_t j = 0; j < n; ++j) lifted[i + 1][j + 1] = a_lift * av[i][j];
    lifted_b[i + 1] = b_lift * bv[i];
  }
  SemigroupSystem<S> out(std::move(lifted), std::move(lifted_b));
  out.metadata = sys.metadata;
  out.metadata["lifted_from"] = "affine";
  return out.validated();
}

template <class S>
Vector<S> phi(const Vector<S>& y) {
  if (y.size() < 2) throw Error(ErrorCode::DimensionMismatch, "phi needs at least 2 coordinates");
  if (magnitude(y(0)) <= default_tau_zero()) {
    throw Error(ErrorCode::ZeroFirstCoordinate, "phi undefined for y_1 = 0");
  }
  Vector<S> x(y.size() - 1);
  for (Index i = 0; i < x.size(); ++i) x(i) = y(i + 1) / y(0);
  return x;
}

template <class S>
Vector<S> psi(const Vector<S>& x) {
  Vector<S> y(x.size() + 1);
  y(0) = S(1);
  for (Index i = 0; i < x.size(); ++i) y(i + 1) = x(i);
  return y;
}

std::pair<SemigroupSystem<Real>, ValidationReport> build_quadrant_example(
    const QuadrantParameters& p) {
  ValidationReport report;
  report.add("d > a", p.d > p.a);
  report.add("a > 1", p.a > 1);
  report.add("1 > u", 1 > p.u);
  report.add("u > v", p.u > p.v);
  report.add("v > 0", p.v > 0);
  report.add("b > 0", p.b > 0);
  if (p.v != 0 && p.u != 0 && p.a != 0 && p.d != 0) {
    const auto q = [](const Rational& x) { return FieldElement::from_rational(x); };
    const GeneratingPair lower = certify_generating(q(-p.v), q(p.d));
    const GeneratingPair upper = certify_generating(q(-p.u), q(p.a));
    add_certificate("(-v, d)", lower, report);
    add_certificate("(-u, a)", upper, report);
    add_prec("(-v, d)", lower, "(-u, a)", upper, report);
  }
  const auto e = [](const Rational& x) { return FieldElement::from_rational(x); };
  SemigroupSystem<Real> sys({{e(p.a), e(0)}, {e(p.b), e(p.d)}}, {e(p.u), e(p.v)}, {e(1), e(1)});
  sys.metadata["family"] = "quadrant";
  return {std::move(sys), std::move(report)};
}

template class SemigroupSystem<Real>;
template class SemigroupSystem<Complex>;
template class AffineSystem<Real>;
template class AffineSystem<Complex>;
template SemigroupSystem<Real> lift_affine(const AffineSystem<Real>&, std::optional<FieldElement>,
                                           std::optional<FieldElement>);
template SemigroupSystem<Complex> lift_affine(const AffineSystem<Complex>&,
                                              std::optional<FieldElement>,
                                              std::optional<FieldElement>);
template Vector<Real> phi(const Vector<Real>&);
template Vector<Complex> phi(const Vector<Complex>&);
template Vector<Real> psi(const Vector<Real>&);
template Vector<Complex> psi(const Vector<Complex>&);

}  // namespace hyperorbit
