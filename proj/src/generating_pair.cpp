#include "hyperorbit/generating_pair.hpp"

#include <cmath>
#include <map>
#include <set>

namespace hyperorbit {

std::string_view to_string(Certificate certificate) {
  switch (certificate) {
    case Certificate::CertifiedExact: return "CertifiedExact";
    case Certificate::CertifiedHeuristic: return "CertifiedHeuristic";
    case Certificate::RefutedMagnitude: return "RefutedMagnitude";
    case Certificate::RefutedRationalRatio: return "RefutedRationalRatio";
    case Certificate::RefutedSignCoverage: return "RefutedSignCoverage";
    case Certificate::RefutedPhase: return "RefutedPhase";
    case Certificate::Unknown: return "Unknown";
  }
  return "Unknown";
}

bool is_certified(Certificate certificate) {
  return certificate == Certificate::CertifiedExact ||
         certificate == Certificate::CertifiedHeuristic;
}

std::string_view to_string(PrecOutcome outcome) {
  switch (outcome) {
    case PrecOutcome::Less: return "Less";
    case PrecOutcome::NotLess: return "NotLess";
    case PrecOutcome::Incomparable: return "Incomparable";
  }
  return "Incomparable";
}

namespace {

bool modulus_is_one(const FieldElement& x) {
  if (x.exact_modulus()) return *x.exact_modulus() == 1;
  return x.log_mag() == 0;
}

bool modulus_below_one(const FieldElement& x) {
  if (x.exact_modulus()) return *x.exact_modulus() < 1;
  return x.log_mag() < 0;
}

bool modulus_above_one(const FieldElement& x) {
  if (x.exact_modulus()) return *x.exact_modulus() > 1;
  return x.log_mag() > 0;
}

using Factorization = std::map<Integer, long long>;

// Splits `value` over small primes, leaving the unfactored cofactor.
Integer trial_divide(Integer value, std::uint64_t bound, Factorization& out) {
  for (std::uint64_t d = 2; d <= bound; d = (d == 2 ? 3 : d + 2)) {
    const Integer divisor(d);
    if (divisor * divisor > value) break;
    while (value % divisor == 0) {
      value /= divisor;
      ++out[divisor];
    }
  }
  return value;
}

// Refines a multiset of integers > 1 into a pairwise coprime base.
std::vector<Integer> coprime_base(std::vector<Integer> items) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < items.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < items.size() && !changed; ++j) {
        const Integer g = mp::gcd(items[i], items[j]);
        if (g > 1) {
          Integer u = items[i] / g;
          Integer v = items[j] / g;
          items.erase(items.begin() + static_cast<std::ptrdiff_t>(j));
          items.erase(items.begin() + static_cast<std::ptrdiff_t>(i));
          for (auto&& z : {u, v, g}) {
            if (z > 1) items.push_back(z);
          }
          changed = true;
        }
      }
    }
  }
  std::set<Integer> unique(items.begin(), items.end());
  return {unique.begin(), unique.end()};
}

void split_over_base(Integer value, const std::vector<Integer>& base, Factorization& out) {
  for (const Integer& b : base) {
    while (value % b == 0) {
      value /= b;
      ++out[b];
    }
  }
}

std::optional<EmpiricalDensity> sample_density(const FieldElement& a, const FieldElement& b,
                                               Field field, int side) {
  if (side <= 0) return std::nullopt;
  constexpr int kModulusBins = 16;
  const int angle_bins = field == Field::Complex ? 16 : 2;
  EmpiricalDensity report;
  report.bins_total = static_cast<std::int64_t>(kModulusBins) * angle_bins;
  std::set<int> hit;
  const Real ln2 = mp::log(Real(2));
  for (int m = 0; m < side; ++m) {
    for (int n = 0; n < side; ++n) {
      ++report.samples;
      const Real lm = a.log_mag() * m + b.log_mag() * n;
      if (mp::abs(lm) > ln2) continue;
      ++report.in_annulus;
      const double t = static_cast<double>((lm + ln2) / (2 * ln2));
      const int mod_bin = std::min(kModulusBins - 1, static_cast<int>(t * kModulusBins));
      int angle_bin = 0;
      if (field == Field::Complex) {
        const double u =
            static_cast<double>(wrap_angle(a.arg() * m + b.arg() * n) / two_pi());
        angle_bin = std::min(angle_bins - 1, static_cast<int>(u * angle_bins));
      } else {
        const bool negative = ((a.sign() < 0) && (m % 2 != 0)) != ((b.sign() < 0) && (n % 2 != 0));
        angle_bin = negative ? 1 : 0;
      }
      hit.insert(mod_bin * angle_bins + angle_bin);
    }
  }
  report.bins_hit = static_cast<std::int64_t>(hit.size());
  return report;
}

}  // namespace

Real log_ratio(const FieldElement& a, const FieldElement& b) {
  if (a.is_zero() || b.is_zero()) {
    throw Error(ErrorCode::ZeroModulus, "log ratio needs nonzero moduli");
  }
  if (modulus_is_one(b)) {
    throw Error(ErrorCode::UnitModulusDenominator, "ln|b| = 0");
  }
  return a.log_mag() / b.log_mag();
}

bool looks_rational(const Real& x, int depth) {
  const Real threshold = mp::pow(Real(10), -static_cast<int>(working_digits() / 2));
  Real y = mp::abs(x);
  for (int i = 0; i < depth; ++i) {
    const Real frac = y - mp::floor(y);
    if (frac < threshold) return true;
    y = 1 / frac;
  }
  return false;
}

DependenceResult multiplicative_dependence(const Rational& x, const Rational& y,
                                           std::uint64_t factor_bound) {
  DependenceResult result;
  if (x <= 0 || y <= 0 || x == 1 || y == 1) return result;

  const Integer parts[4] = {mp::numerator(x), mp::denominator(x), mp::numerator(y),
                            mp::denominator(y)};
  Factorization factored[4];
  std::vector<Integer> leftovers;
  Integer cofactors[4];
  for (int i = 0; i < 4; ++i) {
    cofactors[i] = trial_divide(parts[i], factor_bound, factored[i]);
    if (cofactors[i] > 1) leftovers.push_back(cofactors[i]);
  }
  const std::vector<Integer> base = coprime_base(leftovers);
  for (int i = 0; i < 4; ++i) split_over_base(cofactors[i], base, factored[i]);

  std::set<Integer> primes;
  for (const auto& f : factored) {
    for (const auto& [p, e] : f) primes.insert(p);
  }
  auto exponent = [&](int i, const Integer& p) {
    auto it = factored[i].find(p);
    return it == factored[i].end() ? 0LL : it->second;
  };
  std::vector<long long> ex;
  std::vector<long long> ey;
  for (const Integer& p : primes) {
    ex.push_back(exponent(0, p) - exponent(1, p));
    ey.push_back(exponent(2, p) - exponent(3, p));
  }

  result.decided = true;
  std::size_t pivot = 0;
  while (pivot < ey.size() && ey[pivot] == 0) ++pivot;
  if (pivot == ey.size()) return result;
  const long long p = ex[pivot];
  const long long q = ey[pivot];
  for (std::size_t i = 0; i < ex.size(); ++i) {
    if (ex[i] * q != ey[i] * p) return result;
  }
  result.dependent = true;
  result.ratio = Rational(Integer(p), Integer(q));
  return result;
}

GeneratingPair certify_generating(const FieldElement& a, const FieldElement& b,
                                  const CertifyOptions& options) {
  GeneratingPair pair{a, b, Real(0), Certificate::Unknown, {}, std::nullopt};
  const Field field = pair.field();
  auto finish = [&](Certificate certificate, std::string reason) {
    pair.certificate = certificate;
    pair.reason = std::move(reason);
    if (certificate == Certificate::Unknown || options.always_empirical) {
      if (!a.is_zero() && !b.is_zero()) {
        pair.empirical = sample_density(a, b, field, options.empirical_side);
      }
    }
    return pair;
  };

  if (a.is_zero() || b.is_zero()) return finish(Certificate::RefutedMagnitude, "zero entry");
  if (!modulus_below_one(a) || !modulus_above_one(b)) {
    if (!modulus_is_one(b)) pair.log_ratio = log_ratio(a, b);
    return finish(Certificate::RefutedMagnitude, "requires 0 < |a| < 1 < |b|");
  }
  pair.log_ratio = log_ratio(a, b);

  bool ratio_settled = false;
  if (a.exact_modulus() && b.exact_modulus()) {
    const DependenceResult dependence =
        multiplicative_dependence(*a.exact_modulus(), *b.exact_modulus(), options.factor_bound);
    if (dependence.decided && dependence.dependent) {
      return finish(Certificate::RefutedRationalRatio,
                    "ln|a|/ln|b| = " + format_rational(dependence.ratio) + " exactly");
    }
    ratio_settled = dependence.decided;
  }
  const bool ratio_suspicious = !ratio_settled && looks_rational(pair.log_ratio, options.cf_depth);

  if (field == Field::Real && a.sign() > 0 && b.sign() > 0) {
    return finish(Certificate::RefutedSignCoverage, "both generators positive");
  }
  if (field == Field::Complex) {
    const bool a_commensurate = looks_rational(a.arg() / two_pi(), options.cf_depth);
    const bool b_commensurate = looks_rational(b.arg() / two_pi(), options.cf_depth);
    if (a_commensurate && b_commensurate) {
      return finish(Certificate::RefutedPhase, "both arguments commensurate with 2 pi");
    }
  }
  if (ratio_suspicious) {
    return finish(Certificate::Unknown, "log ratio numerically rational; inexact moduli");
  }
  return finish(Certificate::CertifiedHeuristic,
                ratio_settled ? "moduli multiplicatively independent (exact)"
                              : "log ratio passes continued-fraction test");
}

Real default_delta_cmp() { return parse_real(current_tolerances().delta_cmp); }

PrecOrder prec_compare(const GeneratingPair& p, const GeneratingPair& q) {
  return prec_compare(p, q, default_delta_cmp());
}

PrecOrder prec_compare(const GeneratingPair& p, const GeneratingPair& q, const Real& delta_cmp) {
  if (!p.certified() || !q.certified()) {
    return {PrecOutcome::Incomparable, "both pairs must be certified generating pairs"};
  }
  if (p.log_ratio < q.log_ratio - delta_cmp) {
    return {PrecOutcome::Less, format_real(p.log_ratio, 12) + " < " + format_real(q.log_ratio, 12)};
  }
  return {PrecOutcome::NotLess,
          format_real(p.log_ratio, 12) + " >= " + format_real(q.log_ratio, 12) + " - delta"};
}

}  // namespace hyperorbit
