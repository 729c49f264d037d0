#pragma once

#include "hyperorbit/steering.hpp"

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace hyperorbit {

/// Words B^{k_1} A^{l_1} ... B^{k_m} A^{l_m} with k_i <= k_max, l_i <= l_max.
struct WordShape {
  int stages = 1;
  std::int64_t k_max = 0;
  std::int64_t l_max = 0;
};

struct EnumerationOptions {
  std::uint64_t max_words = 10'000'000;
  std::string tau_dedup = "1e-60";
  bool keep_words = false;
};

template <class S>
struct PointCloud {
  Field field = field_of_v<S>;
  Index dimension = 0;
  std::vector<Vector<S>> points;
  std::vector<OrbitWord> words;  // parallel to points when kept
};

/// Number of words of the given shape, or BudgetExceeded past `cap`.
std::uint64_t word_count(const WordShape& shape, std::uint64_t cap);

/// Streams every word of the shape (stage (0, 0) included) with its image of p,
/// in a fixed order. Powers are built incrementally, one factor per step.
template <class S>
void enumerate_orbit(const SemigroupSystem<S>& sys, const Vector<S>& p, const WordShape& shape,
                     const std::function<void(const OrbitWord&, const Vector<S>&)>& visit,
                     std::uint64_t max_words = 10'000'000);

/// Enumerated orbit points with near-duplicates (sup distance < tau_dedup) merged.
template <class S>
PointCloud<S> brute_force_orbit(const SemigroupSystem<S>& sys, const Vector<S>& p,
                                const WordShape& shape, const EnumerationOptions& options = {});

struct Interval {
  Real lo;
  Real hi;
};

struct CoverageReport {
  std::vector<Interval> box;  // one interval per real axis
  Real cell;
  std::uint64_t cells_total = 0;
  std::uint64_t cells_hit = 0;
  Rational fraction;
  std::vector<std::vector<Real>> misses;  // centers of the first uncovered cells
};

/// Incremental form of coverage() for streamed points.
class CoverageCounter {
 public:
  CoverageCounter(std::vector<Interval> box, Real cell, std::size_t miss_samples = 16);

  void add(const std::vector<Real>& coordinates);
  template <class S>
  void add(const Vector<S>& point);

  CoverageReport report() const;

 private:
  std::vector<Interval> box_;
  Real cell_;
  std::size_t miss_samples_;
  std::vector<std::uint64_t> cells_per_axis_;
  std::uint64_t total_ = 1;
  std::set<std::uint64_t> hit_;
};

/// Coordinates along real axes; complex entries contribute (re, im).
template <class S>
std::vector<Real> real_axes(const Vector<S>& v);

/// Regular grid of side `cell` over the box; a cell is hit when a point lies in it
/// (cells are half-open except at the upper edge of the box).
template <class S>
CoverageReport coverage(const PointCloud<S>& cloud, const std::vector<Interval>& box,
                        const Real& cell, std::size_t miss_samples = 16);

struct Lemma1Pair {
  std::string a_label;  // (a, b): the pair driven to zero
  std::string c_label;  // (c, d): the pair held below M
  std::int64_t enumerated = 0;
  std::int64_t violations = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> witnesses;
  std::int64_t threshold = 0;  // smallest m whose bound is below -100
  Real max_beyond;             // max of m ln|a| + n ln|b| over the cone, m >= threshold
  bool passed = false;
  std::string detail;
};

struct Lemma2Result {
  Real lambda;
  std::int64_t depth = 0;
  std::int64_t violations = 0;
  std::vector<std::string> witnesses;  // "l,i,j,forward|inverse"
  Real worst_ratio;                    // max |entry| / bound
  bool passed = false;
};

struct Lemma3Result {
  Real rate;
  Real C;
  std::int64_t depth = 0;
  std::int64_t violations = 0;
  std::vector<std::int64_t> witnesses;  // l with a violated rate bound
  Real worst_ratio;                     // max distance / (C rate^l)
  Real block_identity_error;            // |limit_col + (F - I)^{-1} H|_max
  bool passed = false;
};

struct LemmaReport {
  std::vector<Lemma1Pair> lemma1;
  std::optional<Lemma2Result> lemma2;
  std::optional<Lemma3Result> lemma3;
  bool passed() const;
};

struct Lemma1Options {
  Real bound_m = Real(1000);
  std::int64_t max_m = 500;
  std::int64_t max_n = 500;
  Real escape_level = Real(-100);
};

/// The cone bound for (a, b) against (c, d), assuming ln|a|/ln|b| < ln|c|/ln|d|.
Lemma1Pair check_lemma1(const FieldElement& a, const FieldElement& b, const FieldElement& c,
                        const FieldElement& d, const Lemma1Options& options = {});

/// Powers are formed by plain dense products at doubled precision.
template <class S>
Lemma2Result check_lemma2(const LowerTriangular<S>& a, std::int64_t depth);
template <class S>
Lemma3Result check_lemma3(const LowerTriangular<S>& a, std::int64_t depth);

/// Cone bound on every ordered pair of the system's ratio set; growth and convergence bounds on A.
template <class S>
LemmaReport verify_lemmas(const SemigroupSystem<S>& sys, std::int64_t depth,
                          const Lemma1Options& lemma1 = {});

template <class S>
struct DensityOutcome {
  Vector<S> target;
  bool found = false;
  OrbitWord word;
  Real error;
  bool reverified = false;
  std::string failure;
};

template <class S>
struct DensitySummary {
  std::int64_t total = 0;
  std::int64_t successes = 0;
  Rational fraction;
  Real max_error;
  std::int64_t max_stages = 0;
  std::int64_t max_exponent = 0;        // largest single k or l
  std::int64_t max_total_exponent = 0;  // largest sum over a word
  std::int64_t reverify_failures = 0;
  std::vector<DensityOutcome<S>> outcomes;
};

/// synthesize_word per target; every success is re-evaluated at doubled precision
/// and must agree with the stored error within 2 ulp.
template <class S>
DensitySummary<S> density_experiment(const SemigroupSystem<S>& sys,
                                     const std::vector<Vector<S>>& targets, const Real& eps,
                                     const SearchBudget& budget = {});

struct PositivityReport {
  std::uint64_t points = 0;
  std::uint64_t outside = 0;  // points with a negative coordinate
  std::uint64_t nonpositive = 0;  // points with a coordinate <= 0
};

/// Coverage of the box plus the sign census of every enumerated orbit point.
struct QuadrantReport {
  CoverageReport coverage;
  PositivityReport positivity;
  bool passed = false;
};

QuadrantReport quadrant_experiment(const SemigroupSystem<Real>& sys, const WordShape& shape,
                                   const std::vector<Interval>& box, const Real& cell,
                                   std::uint64_t max_words = 10'000'000);

struct SvgOptions {
  int width = 640;
  int height = 640;
  int margin = 32;
  double radius = 1.5;
};

/// Scatter plot of the first two real axes (a single axis is drawn on y = 0),
/// mapped from the box to a fixed viewport. Points outside the box are skipped.
std::string svg_scatter(const std::vector<std::vector<Real>>& points,
                        const std::vector<Interval>& box, const SvgOptions& options = {});

}  // namespace hyperorbit
