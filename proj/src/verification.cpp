#include "hyperorbit/verification.hpp"

#include <algorithm>
#include <numeric>

namespace hyperorbit {

namespace {

constexpr std::size_t kMaxWitnesses = 8;

template <class S>
S zero_of() {
  return S(Real(0));
}

template <class S>
Vector<S> promote_vector(const Vector<S>& v) {
  Vector<S> out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = promote(v(i));
  return out;
}

template <class S>
Matrix<S> promote_matrix(const Matrix<S>& m) {
  Matrix<S> out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = promote(m(i, j));
  return out;
}

template <class S>
Matrix<S> identity_of(Index n) {
  Matrix<S> out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = i == j ? S(Real(1)) : zero_of<S>();
  return out;
}

// Slack for comparisons against a bound computed at the working precision.
Real slack_factor(unsigned digits) { return 1 + mp::pow(Real(10), -static_cast<int>(digits) + 8); }

template <class S>
void enumerate_level(const LowerTriangular<S>& a, const Diagonal<S>& b, const WordShape& shape,
                     int level, const Vector<S>& x, OrbitWord& word,
                     const std::function<void(const OrbitWord&, const Vector<S>&)>& visit) {
  Vector<S> xl = x;
  for (std::int64_t l = 0; l <= shape.l_max; ++l) {
    if (l > 0) xl = a.multiply(xl);
    Vector<S> xk = xl;
    for (std::int64_t k = 0; k <= shape.k_max; ++k) {
      if (k > 0) xk = xk.cwiseProduct(b.entries());
      word.stages[static_cast<std::size_t>(level)] = {k, l};
      if (level == 0) {
        visit(word, xk);
      } else {
        enumerate_level(a, b, shape, level - 1, xk, word, visit);
      }
    }
  }
}

bool axes_less(const std::vector<Real>& x, const std::vector<Real>& y) {
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

Real sup_distance(const std::vector<Real>& x, const std::vector<Real>& y) {
  Real d(0);
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, Real(mp::abs(x[i] - y[i])));
  return d;
}

std::uint64_t cells_along(const Interval& axis, const Real& cell) {
  const Real ratio = (axis.hi - axis.lo) / cell;
  const Real nearest = mp::round(ratio);
  const Real tolerance = mp::pow(Real(10), -20) * std::max(Real(1), ratio);
  const Real count = mp::abs(ratio - nearest) < tolerance ? nearest : Real(mp::ceil(ratio));
  return std::max<std::uint64_t>(1, count.convert_to<std::uint64_t>());
}

struct RatioPair {
  std::string label;
  FieldElement a;
  FieldElement b;
  Real ratio;
};

}  // namespace

std::uint64_t word_count(const WordShape& shape, std::uint64_t cap) {
  if (shape.stages < 1 || shape.k_max < 0 || shape.l_max < 0) {
    throw Error(ErrorCode::InvalidArgument, "word shape needs stages >= 1 and nonnegative caps");
  }
  const Integer per_stage = Integer(shape.k_max + 1) * Integer(shape.l_max + 1);
  const Integer total = mp::pow(per_stage, static_cast<unsigned>(shape.stages));
  if (total > cap) {
    throw Error(ErrorCode::BudgetExceeded,
                total.str() + " words exceed the enumeration cap " + std::to_string(cap));
  }
  return total.convert_to<std::uint64_t>();
}

template <class S>
void enumerate_orbit(const SemigroupSystem<S>& sys, const Vector<S>& p, const WordShape& shape,
                     const std::function<void(const OrbitWord&, const Vector<S>&)>& visit,
                     std::uint64_t max_words) {
  word_count(shape, max_words);
  if (p.size() != sys.n()) throw Error(ErrorCode::DimensionMismatch, "seed has the wrong dimension");
  const auto a = sys.a();
  const auto b = sys.b();
  OrbitWord word;
  word.stages.resize(static_cast<std::size_t>(shape.stages));
  enumerate_level(a, b, shape, shape.stages - 1, p, word, visit);
}

template <class S>
PointCloud<S> brute_force_orbit(const SemigroupSystem<S>& sys, const Vector<S>& p,
                                const WordShape& shape, const EnumerationOptions& options) {
  struct Entry {
    std::vector<Real> axes;
    Vector<S> point;
    OrbitWord word;
  };
  std::vector<Entry> entries;
  entries.reserve(word_count(shape, options.max_words));
  enumerate_orbit<S>(
      sys, p, shape,
      [&](const OrbitWord& word, const Vector<S>& x) {
        entries.push_back({real_axes(x), x, options.keep_words ? word : OrbitWord{}});
      },
      options.max_words);
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& x, const Entry& y) { return axes_less(x.axes, y.axes); });

  const Real tau = parse_real(options.tau_dedup);
  PointCloud<S> cloud;
  cloud.dimension = sys.n();
  std::vector<const Entry*> kept;
  for (const auto& e : entries) {
    bool duplicate = false;
    for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
      if (e.axes[0] - (*it)->axes[0] >= tau) break;
      if (sup_distance(e.axes, (*it)->axes) < tau) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    kept.push_back(&e);
    cloud.points.push_back(e.point);
    if (options.keep_words) cloud.words.push_back(e.word);
  }
  return cloud;
}

template <class S>
std::vector<Real> real_axes(const Vector<S>& v) {
  std::vector<Real> out;
  for (Index i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<S, Real>) {
      out.push_back(v(i));
    } else {
      out.push_back(v(i).real());
      out.push_back(v(i).imag());
    }
  }
  return out;
}

CoverageCounter::CoverageCounter(std::vector<Interval> box, Real cell, std::size_t miss_samples)
    : box_(std::move(box)), cell_(std::move(cell)), miss_samples_(miss_samples) {
  if (!(cell_ > 0)) throw Error(ErrorCode::InvalidArgument, "cell must be positive");
  if (box_.empty()) throw Error(ErrorCode::InvalidArgument, "box needs at least one axis");
  for (const auto& axis : box_) {
    if (!(axis.hi > axis.lo)) throw Error(ErrorCode::InvalidArgument, "degenerate box axis");
    const std::uint64_t cells = cells_along(axis, cell_);
    if (cells > (std::uint64_t{1} << 40) / total_) {
      throw Error(ErrorCode::BudgetExceeded, "coverage grid has too many cells");
    }
    cells_per_axis_.push_back(cells);
    total_ *= cells;
  }
}

void CoverageCounter::add(const std::vector<Real>& coordinates) {
  if (coordinates.size() != box_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "point and box have different axis counts");
  }
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < box_.size(); ++i) {
    const Real& x = coordinates[i];
    if (x < box_[i].lo || x > box_[i].hi) return;
    const Real t = mp::floor((x - box_[i].lo) / cell_);
    std::uint64_t cell = t.convert_to<std::uint64_t>();
    cell = std::min(cell, cells_per_axis_[i] - 1);
    index = index * cells_per_axis_[i] + cell;
  }
  hit_.insert(index);
}

template <class S>
void CoverageCounter::add(const Vector<S>& point) {
  add(real_axes(point));
}

CoverageReport CoverageCounter::report() const {
  CoverageReport out;
  out.box = box_;
  out.cell = cell_;
  out.cells_total = total_;
  out.cells_hit = hit_.size();
  out.fraction = Rational(Integer(out.cells_hit), Integer(out.cells_total));
  auto next_hit = hit_.begin();
  for (std::uint64_t index = 0; index < total_ && out.misses.size() < miss_samples_; ++index) {
    while (next_hit != hit_.end() && *next_hit < index) ++next_hit;
    if (next_hit != hit_.end() && *next_hit == index) continue;
    std::vector<Real> center(box_.size());
    std::uint64_t rest = index;
    for (std::size_t i = box_.size(); i-- > 0;) {
      const std::uint64_t cell = rest % cells_per_axis_[i];
      rest /= cells_per_axis_[i];
      center[i] = box_[i].lo + (Real(cell) + Real(0.5)) * cell_;
    }
    out.misses.push_back(std::move(center));
  }
  return out;
}

template <class S>
CoverageReport coverage(const PointCloud<S>& cloud, const std::vector<Interval>& box,
                        const Real& cell, std::size_t miss_samples) {
  CoverageCounter counter(box, cell, miss_samples);
  for (const auto& x : cloud.points) counter.add(x);
  return counter.report();
}

bool LemmaReport::passed() const {
  bool ok = std::all_of(lemma1.begin(), lemma1.end(), [](const Lemma1Pair& p) { return p.passed; });
  if (lemma2) ok = ok && lemma2->passed;
  if (lemma3) ok = ok && lemma3->passed;
  return ok;
}

Lemma1Pair check_lemma1(const FieldElement& a, const FieldElement& b, const FieldElement& c,
                        const FieldElement& d, const Lemma1Options& options) {
  Lemma1Pair out;
  const Real la = a.log_mag();
  const Real lb = b.log_mag();
  const Real lc = c.log_mag();
  const Real ld = d.log_mag();
  if (!(la < 0 && lc < 0 && lb > 0 && ld > 0)) {
    out.detail = "needs |a|, |c| < 1 < |b|, |d|";
    return out;
  }
  const Real ra = la / lb;
  const Real rc = lc / ld;
  if (!(ra < rc)) {
    out.detail = "needs ln|a|/ln|b| < ln|c|/ln|d|";
    return out;
  }
  const Real log_m = mp::log(options.bound_m);
  const Real slope = lb * (ra - rc);
  const Real intercept = log_m * lb / ld;
  auto bound = [&](std::int64_t m) { return Real(slope * m + intercept); };
  const Real tolerance = mp::pow(Real(10), -static_cast<int>(working_digits()) + 10);

  out.threshold = 0;
  const Real start = mp::ceil((options.escape_level - intercept) / slope);
  if (start > 0) out.threshold = start.convert_to<std::int64_t>();
  while (!(bound(out.threshold) < options.escape_level)) ++out.threshold;
  while (out.threshold > 0 && bound(out.threshold - 1) < options.escape_level) --out.threshold;

  bool any_beyond = false;
  out.max_beyond = options.escape_level;
  for (std::int64_t m = 0; m <= options.max_m; ++m) {
    const Real room = (log_m - lc * m) / ld;
    if (room < 0) continue;
    const std::int64_t n_top = std::min<std::int64_t>(
        options.max_n, Real(mp::floor(room)).convert_to<std::int64_t>());
    const Real rhs = bound(m);
    for (std::int64_t n = 0; n <= n_top; ++n) {
      ++out.enumerated;
      const Real value = la * m + lb * n;
      if (value > rhs + tolerance * (1 + mp::abs(rhs))) {
        ++out.violations;
        if (out.witnesses.size() < kMaxWitnesses) out.witnesses.emplace_back(m, n);
      }
      if (m >= out.threshold && (!any_beyond || value > out.max_beyond)) {
        out.max_beyond = value;
        any_beyond = true;
      }
    }
  }
  const bool escaped = !any_beyond || out.max_beyond < options.escape_level;
  out.passed = out.violations == 0 && escaped;
  if (!escaped) out.detail = "cone maximum beyond the threshold is not below the escape level";
  return out;
}

template <class S>
Lemma2Result check_lemma2(const LowerTriangular<S>& a, std::int64_t depth) {
  Lemma2Result out;
  out.lambda = growth_lambda(a).lambda;
  out.depth = depth;
  const unsigned digits = working_digits();
  PrecisionScope wide(2 * digits);
  const Index n = a.n();
  const Matrix<S> dense = promote_matrix(a.dense());
  const Matrix<S> inverse =
      dense.template triangularView<Eigen::Lower>().solve(identity_of<S>(n));
  const Real lambda = promote(out.lambda);
  const Real slack = slack_factor(digits);
  Matrix<S> forward = identity_of<S>(n);
  Matrix<S> backward = identity_of<S>(n);
  out.worst_ratio = 0;
  for (std::int64_t l = 1; l <= depth; ++l) {
    forward = Matrix<S>(forward * dense);
    backward = Matrix<S>(backward * inverse);
    for (Index i = 0; i < n; ++i) {
      const Real row_bound = lambda * mp::pow(magnitude(dense(i, i)), Real(l));
      const Real col_bound = lambda * mp::pow(magnitude(dense(i, i)), Real(-l));
      for (Index j = 0; j < n; ++j) {
        const Real fwd = magnitude(forward(i, j)) / row_bound;
        // column bound for the inverse uses |A_j|, i.e. entry (j, i) here
        const Real inv = magnitude(backward(j, i)) / col_bound;
        out.worst_ratio = std::max({out.worst_ratio, fwd, inv});
        for (const auto& [ratio, kind, r, c] :
             {std::tuple{fwd, "forward", i, j}, std::tuple{inv, "inverse", j, i}}) {
          if (ratio > slack) {
            ++out.violations;
            if (out.witnesses.size() < kMaxWitnesses) {
              out.witnesses.push_back(std::to_string(l) + "," + std::to_string(r + 1) + "," +
                                      std::to_string(c + 1) + "," + kind);
            }
          }
        }
      }
    }
  }
  Real worst = out.worst_ratio;
  {
    PrecisionScope back(digits);
    out.worst_ratio = promote(worst);
  }
  out.passed = out.violations == 0;
  return out;
}

template <class S>
Lemma3Result check_lemma3(const LowerTriangular<S>& a, std::int64_t depth) {
  Lemma3Result out;
  const auto limit = normalized_inverse_limit(a);
  out.rate = limit.rate;
  out.C = limit.C;
  out.depth = depth;
  const unsigned digits = working_digits();
  const Index n = a.n();
  Real worst(0);
  Real identity_error(0);
  {
    PrecisionScope wide(2 * digits);
    const Matrix<S> dense = promote_matrix(a.dense());
    const Matrix<S> inverse =
        dense.template triangularView<Eigen::Lower>().solve(identity_of<S>(n));
    const Matrix<S> normalized = inverse * promote(dense(0, 0));
    const Matrix<S> full_limit = promote_matrix(limit.full_limit);
    const Real rate = promote(limit.rate);
    const Real c = promote(limit.C);
    const Real slack = slack_factor(digits);
    // rounding of the wide products; the bound itself is 0 when n = 1
    const Real noise = mp::pow(Real(10), -static_cast<int>(digits));
    Matrix<S> power = identity_of<S>(n);
    for (std::int64_t l = 1; l <= depth; ++l) {
      power = Matrix<S>(power * normalized);
      const Real distance = norm_max(Matrix<S>(power - full_limit));
      const Real bound = c * mp::pow(rate, Real(l));
      const Real ratio = distance / std::max(bound, noise);
      worst = std::max(worst, ratio);
      if (distance > bound * slack + noise) {
        ++out.violations;
        if (out.witnesses.size() < kMaxWitnesses) out.witnesses.push_back(l);
      }
    }
    if (n > 1) {
      Matrix<S> shifted = normalized.bottomRightCorner(n - 1, n - 1);
      for (Index i = 0; i < n - 1; ++i) shifted(i, i) -= S(Real(1));
      const Vector<S> h = normalized.bottomLeftCorner(n - 1, 1);
      const Vector<S> solved = shifted.partialPivLu().solve(h);
      identity_error = norm_inf(Vector<S>(promote_vector(limit.limit_col) + solved));
    }
  }
  out.worst_ratio = promote(worst);
  out.block_identity_error = promote(identity_error);
  out.passed = out.violations == 0 && out.block_identity_error < mp::pow(Real(10), -30);
  return out;
}

template <class S>
LemmaReport verify_lemmas(const SemigroupSystem<S>& sys, std::int64_t depth,
                          const Lemma1Options& lemma1) {
  LemmaReport report;
  const auto& a = sys.a_entries();
  const auto& b = sys.b_entries();
  std::vector<RatioPair> pairs;
  pairs.push_back({"(B_1, A_1)", b[0], a[0][0], Real(0)});
  for (std::size_t j = 1; j < b.size(); ++j) {
    const std::string idx = std::to_string(j + 1);
    pairs.push_back({"(B_" + idx + "/B_1, A_" + idx + "/A_1)", b[j] / b[0], a[j][j] / a[0][0],
                     Real(0)});
  }
  for (auto& p : pairs) p.ratio = p.a.log_mag() / p.b.log_mag();
  for (const auto& p : pairs) {
    for (const auto& q : pairs) {
      if (!(p.ratio < q.ratio)) continue;
      Lemma1Pair result = check_lemma1(p.a, p.b, q.a, q.b, lemma1);
      result.a_label = p.label;
      result.c_label = q.label;
      report.lemma1.push_back(std::move(result));
    }
  }
  const auto dense = sys.a();
  report.lemma2 = check_lemma2(dense, depth);
  report.lemma3 = check_lemma3(dense, depth);
  return report;
}

template <class S>
DensitySummary<S> density_experiment(const SemigroupSystem<S>& sys,
                                     const std::vector<Vector<S>>& targets, const Real& eps,
                                     const SearchBudget& budget) {
  DensitySummary<S> summary;
  summary.max_error = 0;
  const unsigned digits = working_digits();
  const int bits = static_cast<int>(mpfr_get_prec(Real(0).backend().data()));
  for (const auto& y : targets) {
    DensityOutcome<S> outcome;
    outcome.target = y;
    ++summary.total;
    try {
      const auto result = synthesize_word(sys, y, eps, budget);
      outcome.found = true;
      outcome.word = result.word;
      outcome.error = result.error;
      Real recomputed;
      {
        PrecisionScope wide(2 * digits);
        const Vector<S> achieved = evaluate_word(sys, result.word, sys.seed());
        const Real wide_error = norm_inf(Vector<S>(achieved - promote_vector(y)));
        PrecisionScope back(digits);
        recomputed = promote(wide_error);
      }
      const Real ulp = mp::ldexp(mp::abs(result.error), 1 - bits);
      outcome.reverified = recomputed < eps && mp::abs(recomputed - result.error) <= 2 * ulp;
      if (!outcome.reverified) {
        ++summary.reverify_failures;
        outcome.failure = "re-evaluation gives " + format_real(recomputed, 20);
      }
    } catch (const Error& e) {
      outcome.failure = e.what();
    }
    if (outcome.found && outcome.reverified) {
      ++summary.successes;
      summary.max_error = std::max(summary.max_error, outcome.error);
      summary.max_stages =
          std::max<std::int64_t>(summary.max_stages, static_cast<std::int64_t>(outcome.word.stages.size()));
      for (const auto& st : outcome.word.stages) {
        summary.max_exponent = std::max({summary.max_exponent, st.k, st.l});
      }
      summary.max_total_exponent = std::max(summary.max_total_exponent, outcome.word.total_exponent());
    }
    summary.outcomes.push_back(std::move(outcome));
  }
  summary.fraction = summary.total == 0 ? Rational(0)
                                        : Rational(Integer(summary.successes), Integer(summary.total));
  return summary;
}

QuadrantReport quadrant_experiment(const SemigroupSystem<Real>& sys, const WordShape& shape,
                                   const std::vector<Interval>& box, const Real& cell,
                                   std::uint64_t max_words) {
  QuadrantReport out;
  CoverageCounter counter(box, cell);
  enumerate_orbit<Real>(
      sys, sys.seed(), shape,
      [&](const OrbitWord&, const Vector<Real>& x) {
        ++out.positivity.points;
        bool negative = false;
        bool nonpositive = false;
        for (Index i = 0; i < x.size(); ++i) {
          negative = negative || x(i) < 0;
          nonpositive = nonpositive || x(i) <= 0;
        }
        if (negative) ++out.positivity.outside;
        if (nonpositive) ++out.positivity.nonpositive;
        counter.add(x);
      },
      max_words);
  out.coverage = counter.report();
  out.passed = out.positivity.outside == 0 && out.positivity.nonpositive == 0;
  return out;
}

#define HYPERORBIT_INSTANTIATE(S)                                                              \
  template void enumerate_orbit(const SemigroupSystem<S>&, const Vector<S>&, const WordShape&, \
                                const std::function<void(const OrbitWord&, const Vector<S>&)>&, \
                                std::uint64_t);                                                 \
  template PointCloud<S> brute_force_orbit(const SemigroupSystem<S>&, const Vector<S>&,        \
                                           const WordShape&, const EnumerationOptions&);       \
  template std::vector<Real> real_axes(const Vector<S>&);                                      \
  template void CoverageCounter::add(const Vector<S>&);                                        \
  template CoverageReport coverage(const PointCloud<S>&, const std::vector<Interval>&,         \
                                   const Real&, std::size_t);                                  \
  template Lemma2Result check_lemma2(const LowerTriangular<S>&, std::int64_t);                 \
  template Lemma3Result check_lemma3(const LowerTriangular<S>&, std::int64_t);                 \
  template LemmaReport verify_lemmas(const SemigroupSystem<S>&, std::int64_t,                  \
                                     const Lemma1Options&);                                    \
  template DensitySummary<S> density_experiment(const SemigroupSystem<S>&,                     \
                                                const std::vector<Vector<S>>&, const Real&,    \
                                                const SearchBudget&);

HYPERORBIT_INSTANTIATE(Real)
HYPERORBIT_INSTANTIATE(Complex)

#undef HYPERORBIT_INSTANTIATE

}  // namespace hyperorbit
