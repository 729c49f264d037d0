#pragma once

#include "hyperorbit/field_element.hpp"

#include <optional>
#include <string>

namespace hyperorbit {

enum class Certificate {
  CertifiedExact,
  CertifiedHeuristic,
  RefutedMagnitude,
  RefutedRationalRatio,
  RefutedSignCoverage,
  RefutedPhase,
  Unknown,
};

std::string_view to_string(Certificate certificate);
bool is_certified(Certificate certificate);

/// Sampled coverage of the annulus 1/2 <= |z| <= 2 by products a^m b^n.
struct EmpiricalDensity {
  std::int64_t samples = 0;
  std::int64_t in_annulus = 0;
  std::int64_t bins_total = 0;
  std::int64_t bins_hit = 0;
};

/// A pair (a, b) whose products a^m b^n are (claimed) dense in the field.
struct GeneratingPair {
  FieldElement a;
  FieldElement b;
  Real log_ratio;  // ln|a| / ln|b|
  Certificate certificate = Certificate::Unknown;
  std::string reason;
  std::optional<EmpiricalDensity> empirical;

  Field field() const {
    return (a.field() == Field::Complex || b.field() == Field::Complex) ? Field::Complex
                                                                          : Field::Real;
  }
  bool certified() const { return is_certified(certificate); }
};

struct CertifyOptions {
  /// Trial division bound used when factoring exact rational moduli.
  std::uint64_t factor_bound = 1'000'000;
  /// Continued-fraction depth of the commensurability tests.
  int cf_depth = 64;
  /// Side length K of the m, n < K sample grid for the empirical report.
  int empirical_side = 32;
  /// Attach the empirical report to every certificate, not just Unknown.
  bool always_empirical = false;
};

Real log_ratio(const FieldElement& a, const FieldElement& b);

GeneratingPair certify_generating(const FieldElement& a, const FieldElement& b,
                                  const CertifyOptions& options = {});

enum class PrecOutcome { Less, NotLess, Incomparable };

std::string_view to_string(PrecOutcome outcome);

struct PrecOrder {
  PrecOutcome outcome = PrecOutcome::Incomparable;
  std::string reason;
};

/// Default strictness margin for the log-ratio comparison.
Real default_delta_cmp();

/// p < q in the generating-pair order: log_ratio(p) < log_ratio(q) - delta.
PrecOrder prec_compare(const GeneratingPair& p, const GeneratingPair& q);
PrecOrder prec_compare(const GeneratingPair& p, const GeneratingPair& q, const Real& delta_cmp);

/// Result of the exact multiplicative-dependence test on positive rationals.
struct DependenceResult {
  bool decided = false;
  bool dependent = false;
  /// ln x / ln y when dependent.
  Rational ratio;
};

/// Decides whether x^i = y^j for some integers (i, j) != 0, i.e. whether
/// ln x / ln y is rational. Both inputs must be positive and different from 1.
DependenceResult multiplicative_dependence(const Rational& x, const Rational& y,
                                           std::uint64_t factor_bound);

/// True when the continued fraction of x terminates (to working precision)
/// within `depth` partial quotients.
bool looks_rational(const Real& x, int depth);

}  // namespace hyperorbit
