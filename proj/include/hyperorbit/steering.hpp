#pragma once

#include "hyperorbit/scalar_steering.hpp"
#include "hyperorbit/system.hpp"

#include <vector>

namespace hyperorbit {

struct WordStage {
  std::int64_t k = 0;
  std::int64_t l = 0;
  bool operator==(const WordStage& other) const { return k == other.k && l == other.l; }
};

/// B^{k_1} A^{l_1} ... B^{k_m} A^{l_m}; the last stage acts first.
struct OrbitWord {
  std::vector<WordStage> stages;

  OrbitWord then_apply_after(const OrbitWord& inner) const;  // this * inner
  std::int64_t total_exponent() const;
};

/// Diagnostics for one step of the construction. Stage s = 0 is the base
/// step that places the first coordinate; stage s >= 1 extends K^s to K^{s+1}.
template <class S>
struct SteeringStage {
  Index s = 0;
  S alpha;                   // z_{s+1} / z_1
  S omega;                   // limit of ((A_1 A^{-1})^l)_{s+1,1}
  S scalar_target;           // -alpha / omega (base step: z_1 / p_1)
  WordStage chosen;
  Real budget;               // allowed sup error of this step's output
  Real entry_tolerance;      // per-entry tolerance on O^{k,l} - alpha E
  Real scalar_eps;
  Real scalar_error;
  std::int64_t floor_k = 0;  // exponent floors handed to the scalar search
  std::int64_t floor_l = 0;
  S shift;                   // change applied to z_1 so that O^{k,l} hits z_{s+1}
  Real deviation;            // achieved step error
  Real operator_norm;        // ||B^k A^l||_inf of the chosen factor
  Vector<S> target;          // sub-target this step reaches
  Vector<S> input;           // S^{-l} U^{-k} applied to the sub-target
  int attempts = 0;
  std::int64_t nodes = 0;
};

template <class S>
struct SteeringResult {
  OrbitWord word;
  Vector<S> target;
  Vector<S> achieved;
  Real error;                 // sup-norm, evaluated at doubled precision
  Real error_bound;           // sum of step errors times outer operator norms
  bool surrogate_first = false;  // y_1 = 0 replaced by eps / 4
  std::vector<SteeringStage<S>> stages;  // outermost first
  std::int64_t nodes = 0;
};

/// B^{k_1} A^{l_1} ... B^{k_m} A^{l_m} p, applied right to left.
template <class S>
Vector<S> evaluate_word(const SemigroupSystem<S>& sys, const OrbitWord& word, const Vector<S>& p);
template <class S>
Vector<S> evaluate_word(const LowerTriangular<S>& a, const Diagonal<S>& b, const OrbitWord& word,
                        const Vector<S>& p);

/// Drives the system's seed to within eps (sup norm) of y with at most n stages.
/// Throws NotValidated, SeedFirstCoordinateZero, DimensionMismatch or NotFound.
template <class S>
SteeringResult<S> synthesize_word(const SemigroupSystem<S>& sys, const Vector<S>& y,
                                  const Real& eps, const SearchBudget& budget = {});

/// Affine steering through the lift: Psi(p) is steered toward Psi(y) in
/// dimension n + 1 and the result is read back through Phi. `achieved` and
/// `error` refer to K^n; the word is over the affine generators.
template <class S>
SteeringResult<S> steer_affine(const AffineSystem<S>& sys, const Vector<S>& p, const Vector<S>& y,
                               const Real& eps, const SearchBudget& budget = {});

/// Applies the word with x -> A x + v for A and x -> B x for B.
template <class S>
Vector<S> apply_affine_word(const AffineSystem<S>& sys, const OrbitWord& word, const Vector<S>& p);

}  // namespace hyperorbit
