#include "hyperorbit/steering.hpp"

#include <algorithm>

namespace hyperorbit {

namespace {

constexpr int kMaxAttempts = 256;
// Fraction of a stage's budget spent on its own O^{k,l} deviation; the rest
// is passed inward after division by the stage's operator norm.
Real outer_share() { return Real(3) / 4; }

FieldElement element_of(const Real& x) { return FieldElement::from_real(x); }
FieldElement element_of(const Complex& z) { return FieldElement::from_complex(z); }

template <class S>
Vector<S> zeros(Index n) {
  Vector<S> v(n);
  for (Index i = 0; i < n; ++i) v(i) = S(0);
  return v;
}

// Smallest integer strictly above x, clamped to [0, cap + 1].
std::int64_t floor_above(const Real& x, std::int64_t cap) {
  if (!(x >= 0)) return 0;
  if (x >= cap) return cap + 1;
  return (mp::floor(x) + 1).convert_to<std::int64_t>();
}

template <class S>
Real operator_norm(const LowerTriangular<S>& a, const Diagonal<S>& b, std::int64_t k,
                   std::int64_t l) {
  Matrix<S> m = mat_pow(a, l);
  for (Index i = 0; i < m.rows(); ++i) {
    const S scale = int_pow(b(i), static_cast<std::uint64_t>(k));
    for (Index j = 0; j < m.cols(); ++j) m(i, j) *= scale;
  }
  return norm_inf(m);
}

template <class S>
class Synthesizer {
 public:
  Synthesizer(const SemigroupSystem<S>& sys, const SearchBudget& budget)
      : a_(sys.a()), b_(sys.b()), p_(sys.seed()), budget_(budget),
        pairs_(sys.validation()->pairs) {
    n_ = a_.n();
    lambda_ = growth_lambda(a_).lambda;
    limit_ = normalized_inverse_limit(a_);
  }

  // Stage s >= 1: maps (z_1..z_s, 0..) near (z_1..z_{s+1}, 0..) with sup error
  // below outer_share() * beta. Off-target column m of O^{k,l} may contribute
  // 1/s of that after weighting by |z_m|. Candidates are taken in order of
  // k + l and the first that passes the direct O^{k,l} check is kept; the
  // certified floors are recorded but not imposed.
  SteeringStage<S> extend(Index s, const Vector<S>& z, const Real& beta) {
    SteeringStage<S> st;
    st.s = s;
    st.target = z;
    st.budget = beta;
    const S z1 = z(0);
    const S next = z(s);
    const Vector<S> top = z.head(s);
    const Real top_norm = norm_inf(top);
    st.alpha = next / z1;
    st.omega = limit_.limit_col(s - 1);
    st.scalar_target = -st.alpha / st.omega;
    const Real share = beta * outer_share();
    const Real column_tol = share / Real(s);
    st.entry_tolerance = column_tol / top_norm;

    if (magnitude(next) < share) {
      st.chosen = {0, 0};
      st.deviation = magnitude(next);
      st.operator_norm = Real(1);
      st.input = z;
      st.input(s) = S(0);
      st.shift = S(0);
      st.scalar_eps = Real(0);
      st.scalar_error = Real(0);
      return st;
    }

    // The first coordinate may move by up to `share` (sup-norm budget), so
    // the scalar window covers both that shift and the residual in z_{s+1}.
    const Real target_mod = magnitude(st.scalar_target);
    const Real omega_mod = magnitude(st.omega);
    const Real window = share * (1 + magnitude(st.alpha)) / (omega_mod * magnitude(z1));
    Real delta = std::min(Real(window * Real(0.9)), Real(target_mod / 2));
    const S c = b_(s) / b_(0);
    const S d = a_.diag(s) / a_.diag(0);
    const Real c_log = mp::log(magnitude(c));
    const Real d_log = mp::log(magnitude(d));
    const std::int64_t cap = budget_.max_exponent;
    const Real eta = st.entry_tolerance;

    // Certified floors: finite-l deviation of ((A_1 A^{-1})^l)_{s+1,1} from
    // omega, and the off-target entries along |c^k d^l| <= target + delta.
    if (limit_.rate > 0) {
      const Real need = eta / (2 * limit_.C * (target_mod + delta));
      if (need < 1) st.floor_l = floor_above(mp::log(need) / mp::log(limit_.rate), cap);
    }
    const Real head = mp::log(Real(n_) * lambda_ * lambda_) - mp::log(eta / 2);
    for (Index j = 1; j <= n_ - s; ++j) {
      for (Index m = 1; m <= s; ++m) {
        if (j == 1 && m == 1) continue;
        const Real a_log = mp::log(magnitude(S(a_.diag(j + s - 1) / a_.diag(m - 1))));
        const Real b_log = mp::log(magnitude(S(b_(j + s - 1) / b_(m - 1))));
        const Real kappa = b_log - a_log * c_log / d_log;
        if (!(kappa < 0)) continue;
        const Real rhs = head + a_log * mp::log(target_mod + delta) / d_log;
        st.floor_k = std::max(st.floor_k, floor_above(rhs / (-kappa), cap));
      }
    }

    const FieldElement target = element_of(st.scalar_target);
    const GeneratingPair& pair = pairs_[static_cast<std::size_t>(s)];
    std::int64_t min_k = 0;
    std::int64_t min_l = 0;
    for (int attempt = 1;; ++attempt) {
      st.attempts = attempt;
      if (attempt > kMaxAttempts || min_k > cap || min_l > cap) {
        throw Error(ErrorCode::NotFound,
                    "stage " + std::to_string(s) + ": no candidate passes the O^{k,l} check (" +
                        std::to_string(attempt - 1) + " candidates, max_exponent=" +
                        std::to_string(cap) + ")");
      }
      SearchBudget local = budget_;
      local.min_first = min_k;
      local.min_second = min_l;
      ScalarSolution sol;
      try {
        sol = steer_scalar(pair, target, delta, local);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotFound) throw;
        throw Error(ErrorCode::NotFound, "stage " + std::to_string(s) + " (candidate " +
                                             std::to_string(attempt) + ", scalar eps " +
                                             format_real(delta, 3) + "): " + e.what());
      }
      st.nodes += sol.nodes;
      st.chosen = {sol.m, sol.n};
      st.scalar_eps = delta;
      st.scalar_error = sol.error;

      const Matrix<S> o = o_matrix(a_, b_, s, sol.m, sol.n);
      S shift = -S(S((o.row(0) * top).value()) - next) / o(0, 0);
      if (magnitude(shift) >= share) shift *= S(share * Real(0.999) / magnitude(shift));
      Vector<S> moved = top;
      moved(0) += shift;
      const Vector<S> image = o * moved;
      const bool corner_bad = !(magnitude(S(image(0) - next)) < share);
      bool off_bad = false;
      for (Index m = 0; m < s; ++m) {
        const Real weight = magnitude(moved(m));
        for (Index j = 1; j < o.rows(); ++j) {
          if (!(magnitude(o(j, m)) * weight < column_tol)) off_bad = true;
        }
      }
      Real dev = std::max(magnitude(shift), magnitude(S(image(0) - next)));
      for (Index j = 1; j < image.size(); ++j) dev = std::max(dev, magnitude(image(j)));
      st.deviation = dev;
      st.shift = shift;
      if (!corner_bad && !off_bad) break;
      if (corner_bad) {
        const S scale = int_pow(c, static_cast<std::uint64_t>(sol.m)) *
                        int_pow(d, static_cast<std::uint64_t>(sol.n));
        const Real finite = magnitude(S(o(0, 0) + scale * st.omega)) * magnitude(z1);
        if (finite >= share / 10) {
          min_l = sol.n + 1;
        } else {
          delta /= 2;
        }
      }
      if (off_bad) min_k = sol.m + 1;
    }

    const auto [k, l] = st.chosen;
    Vector<S> scaled = top;
    scaled(0) += st.shift;
    for (Index i = 0; i < s; ++i) scaled(i) /= int_pow(b_(i), static_cast<std::uint64_t>(k));
    const Vector<S> x = mat_pow_apply(a_.leading(s), -l, scaled);
    st.input = zeros<S>(n_);
    st.input.head(s) = x;
    st.operator_norm = operator_norm(a_, b_, k, l);
    return st;
  }

  // Base step: B^k A^l p near (z_1, 0, ..., 0) with error < beta.
  SteeringStage<S> base(const Vector<S>& z, const Real& beta) {
    SteeringStage<S> st;
    st.s = 0;
    st.target = z;
    st.budget = beta;
    st.alpha = S(0);
    st.omega = S(1);
    st.scalar_target = z(0) / p_(0);
    st.entry_tolerance = beta;
    const Real target_mod = magnitude(st.scalar_target);
    const Real p1 = magnitude(p_(0));
    Real delta = std::min(Real(beta / (2 * p1)), Real(target_mod / 2));
    const std::int64_t cap = budget_.max_exponent;
    const Real b1_log = mp::log(magnitude(b_(0)));
    const Real a1_log = mp::log(magnitude(a_.diag(0)));

    // Certified floor for the tail entries along |B_1^k A_1^l| <= target + delta.
    const Real head = mp::log(lambda_ * norm_1(p_)) - mp::log(beta / 2);
    for (Index j = 1; j < n_; ++j) {
      const Real aj = mp::log(magnitude(a_.diag(j)));
      const Real kappa = mp::log(magnitude(b_(j))) - aj * b1_log / a1_log;
      if (!(kappa < 0)) continue;
      const Real rhs = head + aj * mp::log(target_mod + delta) / a1_log;
      st.floor_k = std::max(st.floor_k, floor_above(rhs / (-kappa), cap));
    }

    const FieldElement target = element_of(st.scalar_target);
    std::int64_t min_k = 0;
    for (int attempt = 1;; ++attempt) {
      st.attempts = attempt;
      if (attempt > kMaxAttempts || min_k > cap) {
        throw Error(ErrorCode::NotFound, "base stage: no candidate within the stage budget (" +
                                             std::to_string(attempt - 1) + " candidates)");
      }
      SearchBudget local = budget_;
      local.min_first = min_k;
      ScalarSolution sol;
      try {
        sol = steer_scalar(pairs_[0], target, delta, local);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotFound) throw;
        throw Error(ErrorCode::NotFound, "base stage (candidate " + std::to_string(attempt) +
                                             ", scalar eps " + format_real(delta, 3) +
                                             "): " + e.what());
      }
      st.nodes += sol.nodes;
      st.chosen = {sol.m, sol.n};
      st.scalar_eps = delta;
      st.scalar_error = sol.error;
      const Vector<S> out = mat_pow_apply(b_, sol.m, mat_pow_apply(a_, sol.n, p_));
      const Real corner = magnitude(S(out(0) - z(0)));
      Real rest(0);
      for (Index j = 1; j < n_; ++j) rest = std::max(rest, magnitude(out(j)));
      st.deviation = std::max(corner, rest);
      if (st.deviation < beta) break;
      if (corner >= beta) delta /= 2;
      if (rest >= beta) min_k = sol.m + 1;
    }
    st.input = p_;
    st.operator_norm = operator_norm(a_, b_, st.chosen.k, st.chosen.l);
    return st;
  }

  Index n() const { return n_; }

 private:
  LowerTriangular<S> a_;
  Diagonal<S> b_;
  Vector<S> p_;
  SearchBudget budget_;
  std::vector<GeneratingPair> pairs_;
  Index n_ = 0;
  Real lambda_;
  LimitMatrix<S> limit_;
};

template <class S>
Vector<S> promote_vector(const Vector<S>& v) {
  Vector<S> out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = promote(v(i));
  return out;
}

template <class S>
Vector<S> demote_vector(const Vector<S>& v) {
  return promote_vector(v);
}

}  // namespace

OrbitWord OrbitWord::then_apply_after(const OrbitWord& inner) const {
  OrbitWord out = *this;
  out.stages.insert(out.stages.end(), inner.stages.begin(), inner.stages.end());
  return out;
}

std::int64_t OrbitWord::total_exponent() const {
  std::int64_t total = 0;
  for (const auto& st : stages) total += st.k + st.l;
  return total;
}

template <class S>
Vector<S> evaluate_word(const LowerTriangular<S>& a, const Diagonal<S>& b, const OrbitWord& word,
                        const Vector<S>& p) {
  if (p.size() != a.n() || b.n() != a.n()) {
    throw Error(ErrorCode::DimensionMismatch, "word evaluation: dimensions differ");
  }
  Vector<S> v = p;
  for (auto it = word.stages.rbegin(); it != word.stages.rend(); ++it) {
    if (it->k < 0 || it->l < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent");
    v = mat_pow_apply(b, it->k, mat_pow_apply(a, it->l, v));
  }
  return v;
}

template <class S>
Vector<S> evaluate_word(const SemigroupSystem<S>& sys, const OrbitWord& word, const Vector<S>& p) {
  return evaluate_word(sys.a(), sys.b(), word, p);
}

template <class S>
SteeringResult<S> synthesize_word(const SemigroupSystem<S>& sys, const Vector<S>& y,
                                  const Real& eps, const SearchBudget& budget) {
  if (!sys.accepted()) {
    throw Error(ErrorCode::NotValidated, "steering requires a system that passed validation");
  }
  const Index n = sys.n();
  if (y.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "target has " + std::to_string(y.size()) + " entries, system has n = " +
                    std::to_string(n));
  }
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (sys.seed_entries()[0].is_zero()) {
    throw Error(ErrorCode::SeedFirstCoordinateZero, "seed must have p_1 != 0");
  }

  SteeringResult<S> result;
  result.target = y;
  Vector<S> z = y;
  Real beta = eps;
  if (is_zero(z(0))) {
    z(0) = S(eps / 4);
    result.surrogate_first = true;
    beta = eps * 3 / 4;
  }
  beta = beta * Real(0.9);

  Synthesizer<S> synth(sys, budget);
  for (Index s = n - 1; s >= 1; --s) {
    SteeringStage<S> st = synth.extend(s, z, beta);
    const Real inner = (beta - st.deviation) / st.operator_norm;
    z = st.input;
    beta = inner;
    result.nodes += st.nodes;
    result.stages.push_back(std::move(st));
  }
  SteeringStage<S> last = synth.base(z, beta);
  result.nodes += last.nodes;
  result.stages.push_back(std::move(last));

  for (const auto& st : result.stages) {
    if (st.chosen.k != 0 || st.chosen.l != 0) result.word.stages.push_back(st.chosen);
  }

  result.error_bound = result.surrogate_first ? Real(eps / 4) : Real(0);
  Real factor(1);
  for (const auto& st : result.stages) {
    result.error_bound += factor * st.deviation;
    factor *= st.operator_norm;
  }

  const unsigned digits = working_digits();
  Vector<S> achieved;
  Real error;
  {
    PrecisionScope wide(2 * digits);
    const Vector<S> out = evaluate_word(sys, result.word, sys.seed());
    const Vector<S> target = promote_vector(y);
    error = norm_inf(Vector<S>(out - target));
    achieved = out;
  }
  result.achieved = demote_vector(achieved);
  result.error = promote(error);
  if (!(result.error < eps)) {
    throw Error(ErrorCode::NotFound, "verified error " + format_real(result.error, 6) +
                                         " does not meet eps " + format_real(eps, 6));
  }
  return result;
}

template <class S>
Vector<S> apply_affine_word(const AffineSystem<S>& sys, const OrbitWord& word, const Vector<S>& p) {
  if (p.size() != sys.n()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  const LowerTriangular<S> a(sys.a());
  const Diagonal<S> b = sys.b();
  const Vector<S> v = sys.v();
  Vector<S> x = p;
  for (auto it = word.stages.rbegin(); it != word.stages.rend(); ++it) {
    for (std::int64_t t = 0; t < it->l; ++t) x = a.multiply(x) + v;
    x = mat_pow_apply(b, it->k, x);
  }
  return x;
}

template <class S>
SteeringResult<S> steer_affine(const AffineSystem<S>& sys, const Vector<S>& p, const Vector<S>& y,
                               const Real& eps, const SearchBudget& budget) {
  if (!sys.accepted()) {
    throw Error(ErrorCode::NotValidated, "steering requires a system that passed validation");
  }
  if (p.size() != sys.n() || y.size() != sys.n()) {
    throw Error(ErrorCode::DimensionMismatch, "point and target must have n entries");
  }
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  const Vector<S> lifted_seed = psi(p);
  ElementVector seed;
  for (Index i = 0; i < lifted_seed.size(); ++i) seed.push_back(element_of(lifted_seed(i)));
  const SemigroupSystem<S> lifted = lift_affine(sys).with_seed(seed);

  const Real y_norm = norm_inf(y);
  const Real lifted_eps = std::min(Real(0.25), Real(eps / (4 * (1 + y_norm))));
  SteeringResult<S> result = synthesize_word(lifted, psi(y), lifted_eps, budget);
  if (magnitude(result.achieved(0)) <= default_tau_zero()) {
    throw Error(ErrorCode::PhiDivergence, "lifted point has vanishing first coordinate");
  }
  const Vector<S> through_phi = phi(result.achieved);

  const unsigned digits = working_digits();
  Real error;
  Vector<S> achieved;
  {
    PrecisionScope wide(2 * digits);
    achieved = apply_affine_word(sys, result.word, promote_vector(p));
    error = norm_inf(Vector<S>(achieved - promote_vector(y)));
  }
  result.target = y;
  result.achieved = demote_vector(achieved);
  result.error = promote(error);
  if (!(norm_inf(Vector<S>(through_phi - result.achieved)) <= eps)) {
    throw Error(ErrorCode::PhiDivergence, "Phi image and direct affine evaluation disagree");
  }
  if (!(result.error < eps)) {
    throw Error(ErrorCode::NotFound, "verified affine error " + format_real(result.error, 6) +
                                         " does not meet eps " + format_real(eps, 6));
  }
  return result;
}

#define HYPERORBIT_INSTANTIATE(S)                                                              \
  template Vector<S> evaluate_word(const SemigroupSystem<S>&, const OrbitWord&, const Vector<S>&); \
  template Vector<S> evaluate_word(const LowerTriangular<S>&, const Diagonal<S>&,               \
                                   const OrbitWord&, const Vector<S>&);                         \
  template SteeringResult<S> synthesize_word(const SemigroupSystem<S>&, const Vector<S>&,       \
                                             const Real&, const SearchBudget&);                 \
  template SteeringResult<S> steer_affine(const AffineSystem<S>&, const Vector<S>&,             \
                                          const Vector<S>&, const Real&, const SearchBudget&);  \
  template Vector<S> apply_affine_word(const AffineSystem<S>&, const OrbitWord&, const Vector<S>&);

HYPERORBIT_INSTANTIATE(Real)
HYPERORBIT_INSTANTIATE(Complex)

#undef HYPERORBIT_INSTANTIATE

}  // namespace hyperorbit
