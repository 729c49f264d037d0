#pragma once

#include "hyperorbit/generating_pair.hpp"

namespace hyperorbit {

/// Limits of one steering search. Floors let callers demand large exponents.
struct SearchBudget {
  std::int64_t max_exponent = 1'000'000;
  std::int64_t min_first = 0;
  std::int64_t min_second = 0;
  std::int64_t max_nodes = 10'000'000;
};

struct ScalarSolution {
  std::int64_t m = 0;
  std::int64_t n = 0;
  Real error;             // |a^m b^n - target|
  std::int64_t nodes = 0; // candidates examined
  bool used_convergents = false;
};

/// Finds exponents (m, n) with |a^m b^n - target| < eps, minimising m + n
/// (then m) among solutions inside the budget.
///
/// Real pairs with a narrow admissible strip are solved through the
/// continued-fraction expansion of -ln|a|/ln|b| (a Euclid-style first-hit
/// search per sign class); everything else falls back to a bounded scan that
/// stops once no smaller m + n can remain. Throws Error(NotFound) when the
/// budget is exhausted.
ScalarSolution steer_scalar(const GeneratingPair& pair, const FieldElement& target,
                            const Real& eps, const SearchBudget& budget = {});

/// Smallest x >= 0 with (gamma + x * step) mod 1 in [lo, hi], for
/// 0 <= lo <= hi < 1 and 0 < step < 1. Empty when no hit exists below `limit`
/// or the expansion runs past working precision.
std::optional<Real> first_hit(const Real& step, const Real& gamma, const Real& lo,
                              const Real& hi, const Real& limit);

}  // namespace hyperorbit
