#pragma once

// JSON and CSV forms of systems, reports and steering results. Every number
// is written as a decimal string (or "p/q") so files re-parse bit-exactly.

#include "hyperorbit/verification.hpp"

#include <json.hpp>

#include <string>

namespace hyperorbit {

using Json = nlohmann::json;

inline constexpr const char* kSystemFormat = "hyperorbit-system/1";

/// Field-independent contents of a system file.
struct SystemDocument {
  Field field = Field::Real;
  bool affine = false;
  unsigned precision_digits = kDefaultDigits;
  ElementMatrix a;
  ElementVector b;
  ElementVector v;     // affine translation
  ElementVector seed;  // empty when absent
  std::map<std::string, std::string> metadata;

  Index n() const { return static_cast<Index>(b.size()); }
};

/// "3", "-0.5", "1/3" for real or real-valued entries; {"mod", "arg"} for
/// complex entries with an exact modulus; {"log_mag", "sign" | "arg"} otherwise.
Json element_to_json(const FieldElement& x);
FieldElement element_from_json(const Json& j, Field field);

template <class S>
SystemDocument to_document(const SemigroupSystem<S>& sys);
template <class S>
SystemDocument to_document(const AffineSystem<S>& sys);

Json system_to_json(const SystemDocument& doc);
/// Parses at the file's precision. Throws MalformedInput on unknown or
/// missing fields, bad numbers or inconsistent shapes.
SystemDocument system_from_json(const Json& j);
SystemDocument system_from_text(const std::string& text);

template <class S>
SemigroupSystem<S> semigroup_of(const SystemDocument& doc);
template <class S>
AffineSystem<S> affine_of(const SystemDocument& doc);

/// Decimal string for a real scalar, {"re", "im"} for a complex one.
Json scalar_to_json(const Real& x, unsigned digits = 0);
Json scalar_to_json(const Complex& z, unsigned digits = 0);
template <class S>
Json vector_to_json(const Vector<S>& v, unsigned digits = 0);

Json rational_to_json(const Rational& q);  // {"numerator", "denominator"}
Json word_to_json(const OrbitWord& word);  // [[k, l], ...]

Json validation_to_json(const ValidationReport& report);
template <class S>
Json steering_to_json(const SteeringResult<S>& result);
Json coverage_to_json(const CoverageReport& report);
Json lemmas_to_json(const LemmaReport& report);
template <class S>
Json density_to_json(const DensitySummary<S>& summary);
Json quadrant_to_json(const QuadrantReport& report);

template <class S>
Json cloud_to_json(const PointCloud<S>& cloud);
/// One point per row; complex coordinates become re_i, im_i columns.
template <class S>
std::string cloud_to_csv(const PointCloud<S>& cloud);

/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hyperorbit
