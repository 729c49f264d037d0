#include "hyperorbit/run_config.hpp"

#include <cstdlib>

namespace hyperorbit {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

void positive_decimal(const std::string& name, const std::string& value) {
  Rational q;
  try {
    q = parse_rational(value);
  } catch (const Error&) {
    invalid(name + " is not a number: '" + value + "'");
  }
  if (q <= 0) invalid(name + " must be positive");
}

template <class T>
void take(const Json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::MalformedInput, std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

SearchBudget RunConfig::budget() const {
  SearchBudget b;
  b.max_exponent = max_exponent;
  b.max_nodes = max_nodes;
  return b;
}

EnumerationOptions RunConfig::enumeration() const {
  EnumerationOptions options;
  options.max_words = max_words;
  options.tau_dedup = tau_dedup;
  return options;
}

Tolerances RunConfig::tolerances() const { return Tolerances{tau_zero, delta_cmp}; }

void RunConfig::check() const {
  if (precision_digits == 0) invalid("precision_digits must be positive");
  if (max_exponent <= 0 || max_nodes <= 0 || max_words == 0) invalid("budgets must be positive");
  if (lemma_depth <= 0) invalid("lemma_depth must be positive");
  if (random_targets < 0) invalid("random_targets must be nonnegative");
  if (stages <= 0 || k_max < 0 || l_max < 0) invalid("word shape needs stages >= 1 and nonnegative caps");
  for (const auto& [name, value] :
       {std::pair{"eps", eps}, {"tau_zero", tau_zero}, {"delta_cmp", delta_cmp},
        {"tau_dedup", tau_dedup}, {"target_step", target_step}, {"cell", cell},
        {"min_coverage", min_coverage}}) {
    positive_decimal(name, value);
  }
  if (parse_rational(target_hi) <= parse_rational(target_lo)) invalid("target_hi must exceed target_lo");
  if (parse_rational(box_hi) <= parse_rational(box_lo)) invalid("box_hi must exceed box_lo");
}

Json RunConfig::to_json() const {
  return Json{{"precision_digits", precision_digits},
              {"max_exponent", max_exponent},
              {"max_nodes", max_nodes},
              {"max_words", max_words},
              {"eps", eps},
              {"tau_zero", tau_zero},
              {"delta_cmp", delta_cmp},
              {"tau_dedup", tau_dedup},
              {"seed", seed},
              {"lemma_depth", lemma_depth},
              {"target_lo", target_lo},
              {"target_hi", target_hi},
              {"target_step", target_step},
              {"random_targets", random_targets},
              {"stages", stages},
              {"k_max", k_max},
              {"l_max", l_max},
              {"box_lo", box_lo},
              {"box_hi", box_hi},
              {"cell", cell},
              {"min_coverage", min_coverage},
              {"out", out},
              {"svg", svg}};
}

void RunConfig::merge(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedInput, "config must be a JSON object");
  const Json known = to_json();
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::MalformedInput, "unknown config field '" + key + "'");
  }
  take(j, "precision_digits", precision_digits);
  take(j, "max_exponent", max_exponent);
  take(j, "max_nodes", max_nodes);
  take(j, "max_words", max_words);
  take(j, "eps", eps);
  take(j, "tau_zero", tau_zero);
  take(j, "delta_cmp", delta_cmp);
  take(j, "tau_dedup", tau_dedup);
  take(j, "seed", seed);
  take(j, "lemma_depth", lemma_depth);
  take(j, "target_lo", target_lo);
  take(j, "target_hi", target_hi);
  take(j, "target_step", target_step);
  take(j, "random_targets", random_targets);
  take(j, "stages", stages);
  take(j, "k_max", k_max);
  take(j, "l_max", l_max);
  take(j, "box_lo", box_lo);
  take(j, "box_hi", box_hi);
  take(j, "cell", cell);
  take(j, "min_coverage", min_coverage);
  take(j, "out", out);
  take(j, "svg", svg);
}

void RunConfig::merge_environment() {
  const char* value = std::getenv("HYPERORBIT_PRECISION");
  if (value == nullptr || *value == '\0') return;
  char* end = nullptr;
  const unsigned long digits = std::strtoul(value, &end, 10);
  if (*end != '\0' || digits == 0 || digits > 100000) {
    invalid(std::string("HYPERORBIT_PRECISION must be a positive integer, got '") + value + "'");
  }
  precision_digits = static_cast<unsigned>(digits);
}

RunConfig base_config() {
  RunConfig config;
  config.merge_environment();
  return config;
}

}  // namespace hyperorbit
