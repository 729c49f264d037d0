#include "hyperorbit/scalar_steering.hpp"

#include <limits>

namespace hyperorbit {

namespace {

constexpr int kMaxEuclidDepth = 400;
constexpr int kBoundaryRetries = 16;

// Admissible band for ln|a^m b^n|; `sign` restricts real products.
struct Window {
  Real lo;
  bool lo_infinite = false;
  Real hi;
  int sign = 0;
};

std::int64_t clamp_to_int(const Real& x, std::int64_t lo, std::int64_t hi) {
  if (x <= lo) return lo;
  if (x >= hi) return hi;
  return x.convert_to<std::int64_t>();
}

Real frac(const Real& x) { return x - mp::floor(x); }

Real pos_mod(const Real& x, const Real& m) { return x - m * mp::floor(x / m); }

std::optional<Real> euclid_hit(const Real& a, const Real& modulus, const Real& l, const Real& r,
                               const Real& tiny, int depth) {
  if (l <= 0) return Real(0);
  if (depth > kMaxEuclidDepth || a <= modulus * tiny) return std::nullopt;
  const Real k = mp::ceil(l / a);
  if (a * k <= r) return k;
  const Real reduced = pos_mod(modulus, a);
  const Real l2 = pos_mod(-r, a);
  const Real r2 = pos_mod(-l, a);
  if (l2 > r2) return std::nullopt;
  const auto y = euclid_hit(reduced, a, l2, r2, tiny, depth + 1);
  if (!y) return std::nullopt;
  const Real x = mp::ceil((modulus * *y + l) / a);
  if (a * x - modulus * *y > r + modulus * tiny) return std::nullopt;
  return x;
}

class ScalarSearch {
 public:
  ScalarSearch(const GeneratingPair& pair, const FieldElement& target, const Real& eps,
               const SearchBudget& budget)
      : pair_(pair), target_(target), eps_(eps), budget_(budget) {
    alpha_ = pair.a.log_mag();
    beta_ = pair.b.log_mag();
    complex_ = pair.field() == Field::Complex || target.field() == Field::Complex;
    if (complex_) {
      target_c_ = target.to_complex();
    } else {
      target_r_ = target.to_real();
    }
    build_windows();
  }

  ScalarSolution run() {
    const std::int64_t cap = budget_.max_exponent;
    const std::int64_t m0 = std::max<std::int64_t>(0, budget_.min_first);
    if (m0 > cap || budget_.min_second > cap) fail("floors exceed exponent cap");

    if (!complex_ && windows_.size() == 1 && !windows_[0].lo_infinite) {
      const Real width = (windows_[0].hi - windows_[0].lo) / beta_;
      if (width < 1) return run_convergents(m0, cap);
    }
    if (auto found = scan(m0, cap)) return *found;
    fail("exhausted scan");
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::NotFound, why + " (max_exponent=" +
                                         std::to_string(budget_.max_exponent) + ", nodes=" +
                                         std::to_string(nodes_) + ")");
  }

  void build_windows() {
    const Real modulus = target_.modulus();
    if (eps_ < modulus) {
      windows_.push_back({mp::log(modulus - eps_), false, mp::log(modulus + eps_),
                          complex_ ? 0 : target_.sign()});
    } else {
      windows_.push_back({Real(0), true, mp::log(modulus + eps_), complex_ ? 0 : target_.sign()});
      if (!complex_ && eps_ > modulus) {
        windows_.push_back({Real(0), true, mp::log(eps_ - modulus), -target_.sign()});
      }
    }
  }

  int product_sign(std::int64_t m, std::int64_t n) const {
    const bool neg_a = pair_.a.sign() < 0 && (m % 2 != 0);
    const bool neg_b = pair_.b.sign() < 0 && (n % 2 != 0);
    return neg_a != neg_b ? -1 : 1;
  }

  // Exact acceptance test in rectangular form.
  std::optional<Real> accept(std::int64_t m, std::int64_t n) {
    ++nodes_;
    if (nodes_ > budget_.max_nodes) fail("node budget exhausted");
    const FieldElement value = pair_.a.pow(m) * pair_.b.pow(n);
    Real error = complex_ ? Real(std::abs(value.to_complex() - target_c_))
                          : Real(mp::abs(value.to_real() - target_r_));
    if (error < eps_) return error;
    return std::nullopt;
  }

  std::optional<ScalarSolution> scan(std::int64_t m_begin, std::int64_t m_end) {
    const std::int64_t cap = budget_.max_exponent;
    const std::int64_t n_floor = std::max<std::int64_t>(0, budget_.min_second);
    std::optional<ScalarSolution> best;
    for (std::int64_t m = m_begin; m <= m_end; ++m) {
      const Real base = alpha_ * m;
      std::int64_t lowest = std::numeric_limits<std::int64_t>::max();
      for (const Window& w : windows_) {
        const std::int64_t n_low =
            w.lo_infinite
                ? n_floor
                : std::max(n_floor, clamp_to_int(mp::floor((w.lo - base) / beta_), -1, cap + 1) + 1);
        const std::int64_t n_high =
            std::min(cap, clamp_to_int(mp::ceil((w.hi - base) / beta_), -1, cap + 2) - 1);
        lowest = std::min(lowest, n_low);
        for (std::int64_t n = n_low; n <= n_high; ++n) {
          if (best && m + n >= best->m + best->n) break;
          if (w.sign != 0 && product_sign(m, n) != w.sign) continue;
          if (auto error = accept(m, n)) {
            best = ScalarSolution{m, n, *error, nodes_, false};
            break;
          }
        }
      }
      if (best && m + lowest >= best->m + best->n) break;
      if (lowest > cap) {
        bool all_bounded = true;
        for (const Window& w : windows_) all_bounded = all_bounded && !w.lo_infinite;
        if (all_bounded) break;
      }
    }
    if (best) best->nodes = nodes_;
    return best;
  }

  ScalarSolution run_convergents(std::int64_t m0, std::int64_t cap) {
    const Window& w = windows_[0];
    const Real ratio = -alpha_ / beta_;
    const std::int64_t n_floor = std::max<std::int64_t>(0, budget_.min_second);

    // Below m_split the n-interval may still reach under the n floor; scan it.
    const std::int64_t m_split = std::max(
        m0, clamp_to_int(mp::ceil((Real(n_floor - 1) * beta_ - w.lo) / (-alpha_)), 0, cap + 1));
    if (m_split > m0) {
      if (auto found = scan(m0, std::min(m_split - 1, cap))) return *found;
    }

    const int mu = pair_.a.sign() < 0 ? 2 : 1;
    const int nu = pair_.b.sign() < 0 ? 2 : 1;
    const Real width = (w.hi - w.lo) / beta_;
    const Real tiny = mp::pow(Real(10), -static_cast<int>(working_digits()) + 20);

    std::optional<ScalarSolution> best;
    for (int pm = 0; pm < mu; ++pm) {
      for (int pn = 0; pn < nu; ++pn) {
        if (product_sign(pm, pn) != w.sign) continue;
        std::int64_t m_class = m_split + ((pm - m_split % mu) % mu + mu) % mu;
        for (int attempt = 0; attempt < kBoundaryRetries && m_class <= cap; ++attempt) {
          const Real u0 = w.lo / beta_ + ratio * m_class;
          const Real c0 = (u0 - pn) / nu;
          const Real theta = ratio * mu / nu;
          const Real step = frac(-theta);
          const Real narrow = width / nu;
          if (step == 0 || narrow <= 2 * tiny) break;
          const Real limit((cap - m_class) / mu);
          const auto j = first_hit(step, frac(-c0), tiny, narrow - tiny, limit);
          if (!j) break;
          const std::int64_t jj = j->convert_to<std::int64_t>();
          const std::int64_t m = m_class + mu * jj;
          if (best && m >= best->m) break;
          const Real big_n = mp::ceil(c0 + theta * jj);
          const std::int64_t n = nu * clamp_to_int(big_n, -1, cap + 1) + pn;
          if (n >= n_floor && n <= cap) {
            if (auto error = accept(m, n)) {
              best = ScalarSolution{m, n, *error, nodes_, true};
              break;
            }
          }
          m_class = m + mu;
        }
      }
    }
    if (!best) fail("no convergent hit within cap");
    best->nodes = nodes_;
    return *best;
  }

  const GeneratingPair& pair_;
  const FieldElement& target_;
  Real eps_;
  SearchBudget budget_;
  Real alpha_;
  Real beta_;
  bool complex_ = false;
  Real target_r_;
  Complex target_c_;
  std::vector<Window> windows_;
  std::int64_t nodes_ = 0;
};

}  // namespace

std::optional<Real> first_hit(const Real& step, const Real& gamma, const Real& lo, const Real& hi,
                              const Real& limit) {
  if (gamma >= lo && gamma <= hi) return Real(0);
  const Real shifted_lo = pos_mod(lo - gamma, Real(1));
  const Real shifted_hi = shifted_lo + (hi - lo);
  if (shifted_hi >= 1) return Real(0);
  const Real tiny = mp::pow(Real(10), -static_cast<int>(working_digits()) + 10);
  auto x = euclid_hit(step, Real(1), shifted_lo, shifted_hi, tiny, 0);
  if (!x || *x > limit) return std::nullopt;
  return x;
}

ScalarSolution steer_scalar(const GeneratingPair& pair, const FieldElement& target,
                            const Real& eps, const SearchBudget& budget) {
  if (!pair.certified()) {
    throw Error(ErrorCode::NotCertified, "steering requires a certified generating pair");
  }
  if (target.is_zero()) throw Error(ErrorCode::InvalidArgument, "target must be nonzero");
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (budget.max_exponent < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent cap");
  return ScalarSearch(pair, target, eps, budget).run();
}

}  // namespace hyperorbit
