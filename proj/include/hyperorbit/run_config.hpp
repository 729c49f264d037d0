#pragma once

#include "hyperorbit/serialization.hpp"

#include <optional>
#include <string>

namespace hyperorbit {

/// Everything a command needs to reproduce its output. Tolerances and box
/// bounds are decimal strings so the echoed config re-parses exactly.
struct RunConfig {
  unsigned precision_digits = kDefaultDigits;

  // budgets
  std::int64_t max_exponent = 1'000'000;
  std::int64_t max_nodes = 10'000'000;
  std::uint64_t max_words = 10'000'000;

  // tolerances
  std::string eps = "1e-2";
  std::string tau_zero = "1e-40";
  std::string delta_cmp = "1e-30";
  std::string tau_dedup = "1e-60";

  // randomized suites
  std::uint64_t seed = 1;

  // lemma suite
  std::int64_t lemma_depth = 50;

  // density suite: grid targets on [lo, hi]^n with the given step, or
  // `random_targets` uniform targets when positive
  std::string target_lo = "-1";
  std::string target_hi = "1";
  std::string target_step = "0.1";
  std::int64_t random_targets = 0;

  // coverage suite
  int stages = 2;
  std::int64_t k_max = 40;
  std::int64_t l_max = 40;
  std::string box_lo = "0.1";
  std::string box_hi = "2";
  std::string cell = "0.1";
  std::string min_coverage = "0.9";

  // outputs
  std::string out;
  std::string svg;

  SearchBudget budget() const;
  EnumerationOptions enumeration() const;
  Tolerances tolerances() const;

  /// Throws InvalidArgument unless every numeric field is positive and parses.
  void check() const;

  Json to_json() const;
  /// Overrides the fields present in `j`; unknown keys are MalformedInput.
  void merge(const Json& j);
  /// HYPERORBIT_PRECISION, when set, replaces precision_digits.
  void merge_environment();
};

/// Defaults, then the environment. Flags and the config file are merged by the caller.
RunConfig base_config();

}  // namespace hyperorbit
