#include "hyperorbit/serialization.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace hyperorbit {

namespace {

constexpr unsigned kReportDigits = 20;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedInput, what); }

void require_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
  if (!j.is_object()) malformed(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) malformed("unknown field '" + key + "' in " + where);
  }
  for (const auto& key : required) {
    if (!j.contains(key)) malformed("missing field '" + key + "' in " + where);
  }
}

const std::string& string_of(const Json& j, const std::string& where) {
  if (!j.is_string()) malformed(where + " must be a decimal string");
  return j.get_ref<const std::string&>();
}

ElementVector elements_from_json(const Json& j, Field field, const std::string& where) {
  if (!j.is_array()) malformed(where + " must be an array");
  ElementVector out;
  for (const auto& x : j) out.push_back(element_from_json(x, field));
  return out;
}

Json elements_to_json(const ElementVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(element_to_json(x));
  return out;
}

Json interval_to_json(const Interval& axis) {
  return Json::array({format_real(axis.lo), format_real(axis.hi)});
}

Json real_list(const std::vector<Real>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(format_real(x));
  return out;
}

template <class S>
Json stage_to_json(const SteeringStage<S>& st) {
  return Json{
      {"s", st.s},
      {"alpha", scalar_to_json(st.alpha)},
      {"omega", scalar_to_json(st.omega)},
      {"scalar_target", scalar_to_json(st.scalar_target)},
      {"chosen", Json::array({st.chosen.k, st.chosen.l})},
      {"budget", format_real(st.budget)},
      {"entry_tolerance", format_real(st.entry_tolerance)},
      {"scalar_eps", format_real(st.scalar_eps)},
      {"scalar_error", format_real(st.scalar_error)},
      {"floor_k", st.floor_k},
      {"floor_l", st.floor_l},
      {"shift", scalar_to_json(st.shift)},
      {"deviation", format_real(st.deviation)},
      {"operator_norm", format_real(st.operator_norm)},
      {"target", vector_to_json(st.target)},
      {"input", vector_to_json(st.input)},
      {"attempts", st.attempts},
      {"nodes", st.nodes},
  };
}

Json pair_to_json(const GeneratingPair& pair) {
  Json out{
      {"a", element_to_json(pair.a)},
      {"b", element_to_json(pair.b)},
      {"log_ratio", format_real(pair.log_ratio, kReportDigits)},
      {"certificate", std::string(to_string(pair.certificate))},
      {"reason", pair.reason},
  };
  if (pair.empirical) {
    out["empirical"] = Json{{"samples", pair.empirical->samples},
                            {"in_annulus", pair.empirical->in_annulus},
                            {"bins_total", pair.empirical->bins_total},
                            {"bins_hit", pair.empirical->bins_hit}};
  }
  return out;
}

}  // namespace

Json element_to_json(const FieldElement& x) {
  if (x.is_zero()) return "0";
  if (x.field() == Field::Real) {
    if (const auto q = x.exact_real()) return format_rational(*q);
    return Json{{"log_mag", format_real(x.log_mag())}, {"sign", x.sign()}};
  }
  if (const auto& mod = x.exact_modulus()) {
    const Real arg = x.arg();
    if (arg == 0) return format_rational(*mod);
    if (arg == pi()) return format_rational(-*mod);
    return Json{{"mod", format_rational(*mod)}, {"arg", format_real(arg)}};
  }
  return Json{{"log_mag", format_real(x.log_mag())}, {"arg", format_real(x.arg())}};
}

FieldElement element_from_json(const Json& j, Field field) {
  if (j.is_string()) return FieldElement::from_rational(parse_rational(j.get_ref<const std::string&>()), field);
  if (!j.is_object()) malformed("matrix entries must be decimal strings or objects");
  if (j.contains("mod")) {
    require_keys(j, "complex entry", {"mod", "arg"}, {"mod", "arg"});
    if (field != Field::Complex) malformed("modulus/argument entries need field \"complex\"");
    return FieldElement::from_modulus_arg(parse_rational(string_of(j["mod"], "mod")),
                                          parse_real(string_of(j["arg"], "arg")));
  }
  if (field == Field::Real) {
    require_keys(j, "log-form entry", {"log_mag", "sign"}, {"log_mag", "sign"});
    if (!j["sign"].is_number_integer()) malformed("sign must be +1 or -1");
    const int sign = j["sign"].get<int>();
    if (sign != 1 && sign != -1) malformed("sign must be +1 or -1");
    return FieldElement::from_log_sign(parse_real(string_of(j["log_mag"], "log_mag")), sign);
  }
  require_keys(j, "log-form entry", {"log_mag", "arg"}, {"log_mag", "arg"});
  return FieldElement::from_log_polar(Field::Complex, parse_real(string_of(j["log_mag"], "log_mag")),
                                      parse_real(string_of(j["arg"], "arg")));
}

template <class S>
SystemDocument to_document(const SemigroupSystem<S>& sys) {
  SystemDocument doc;
  doc.field = sys.field();
  doc.precision_digits = working_digits();
  doc.a = sys.a_entries();
  doc.b = sys.b_entries();
  doc.seed = sys.seed_entries();
  doc.metadata = sys.metadata;
  return doc;
}

template <class S>
SystemDocument to_document(const AffineSystem<S>& sys) {
  SystemDocument doc;
  doc.field = sys.field();
  doc.affine = true;
  doc.precision_digits = working_digits();
  doc.a = sys.a_entries();
  doc.b = sys.b_entries();
  doc.v = sys.v_entries();
  doc.metadata = sys.metadata;
  return doc;
}

Json system_to_json(const SystemDocument& doc) {
  Json a = Json::array();
  for (const auto& row : doc.a) a.push_back(elements_to_json(row));
  Json out{
      {"format", kSystemFormat},
      {"field", to_string(doc.field)},
      {"kind", doc.affine ? "affine" : "linear"},
      {"n", doc.n()},
      {"precision_digits", doc.precision_digits},
      {"A", a},
      {"B", elements_to_json(doc.b)},
      {"metadata", Json(doc.metadata)},
  };
  if (doc.affine) out["v"] = elements_to_json(doc.v);
  if (!doc.seed.empty()) out["seed"] = elements_to_json(doc.seed);
  return out;
}

SystemDocument system_from_json(const Json& j) {
  require_keys(j, "system file",
               {"format", "field", "kind", "n", "precision_digits", "A", "B", "v", "seed", "metadata"},
               {"field", "n", "precision_digits", "A", "B"});
  if (j.contains("format") && j["format"] != kSystemFormat) {
    malformed("unsupported format tag; expected " + std::string(kSystemFormat));
  }
  SystemDocument doc;
  try {
    doc.field = field_from_string(string_of(j["field"], "field"));
  } catch (const Error&) {
    malformed("field must be \"real\" or \"complex\"");
  }
  if (j.contains("kind")) {
    const std::string& kind = string_of(j["kind"], "kind");
    if (kind != "linear" && kind != "affine") malformed("kind must be \"linear\" or \"affine\"");
    doc.affine = kind == "affine";
  }
  if (!j["n"].is_number_unsigned() || j["n"].get<std::uint64_t>() == 0) malformed("n must be a positive integer");
  if (!j["precision_digits"].is_number_unsigned() || j["precision_digits"].get<std::uint64_t>() == 0 ||
      j["precision_digits"].get<std::uint64_t>() > 100000) {
    malformed("precision_digits must be a positive integer");
  }
  const std::size_t n = j["n"].get<std::size_t>();
  doc.precision_digits = j["precision_digits"].get<unsigned>();
  PrecisionScope scope(doc.precision_digits);

  if (!j["A"].is_array() || j["A"].size() != n) malformed("A must have n rows");
  for (const auto& row : j["A"]) {
    if (!row.is_array() || row.size() != n) malformed("every row of A must have n entries");
    doc.a.push_back(elements_from_json(row, doc.field, "A row"));
  }
  doc.b = elements_from_json(j["B"], doc.field, "B");
  if (doc.b.size() != n) malformed("B must have n entries");
  if (doc.affine) {
    if (!j.contains("v")) malformed("missing field 'v' in affine system file");
    doc.v = elements_from_json(j["v"], doc.field, "v");
    if (doc.v.size() != n) malformed("v must have n entries");
  } else if (j.contains("v")) {
    malformed("field 'v' is only allowed for affine systems");
  }
  if (j.contains("seed")) {
    doc.seed = elements_from_json(j["seed"], doc.field, "seed");
    if (doc.seed.size() != n) malformed("seed must have n entries");
  }
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) malformed("metadata must be an object");
    for (const auto& [key, value] : j["metadata"].items()) {
      doc.metadata[key] = string_of(value, "metadata value");
    }
  }
  return doc;
}

SystemDocument system_from_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    malformed(std::string("not valid JSON: ") + e.what());
  }
  return system_from_json(j);
}

template <class S>
SemigroupSystem<S> semigroup_of(const SystemDocument& doc) {
  if (doc.affine) malformed("expected a linear system, found an affine one");
  if (doc.field != field_of_v<S>) malformed("system field does not match");
  SemigroupSystem<S> sys(doc.a, doc.b, doc.seed);
  sys.metadata = doc.metadata;
  return sys;
}

template <class S>
AffineSystem<S> affine_of(const SystemDocument& doc) {
  if (!doc.affine) malformed("expected an affine system, found a linear one");
  if (doc.field != field_of_v<S>) malformed("system field does not match");
  AffineSystem<S> sys(doc.a, doc.v, doc.b);
  sys.metadata = doc.metadata;
  return sys;
}

Json scalar_to_json(const Real& x, unsigned digits) { return format_real(x, digits); }

Json scalar_to_json(const Complex& z, unsigned digits) {
  return Json{{"re", format_real(z.real(), digits)}, {"im", format_real(z.imag(), digits)}};
}

template <class S>
Json vector_to_json(const Vector<S>& v, unsigned digits) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(scalar_to_json(v(i), digits));
  return out;
}

Json rational_to_json(const Rational& q) {
  return Json{{"numerator", mp::numerator(q).str()}, {"denominator", mp::denominator(q).str()}};
}

Json word_to_json(const OrbitWord& word) {
  Json out = Json::array();
  for (const auto& st : word.stages) out.push_back(Json::array({st.k, st.l}));
  return out;
}

Json validation_to_json(const ValidationReport& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  Json pairs = Json::array();
  for (const auto& p : report.pairs) pairs.push_back(pair_to_json(p));
  return Json{{"accepted", report.accepted},
              {"checks", checks},
              {"reasons", report.reasons()},
              {"pairs", pairs},
              {"column", report.column}};
}

template <class S>
Json steering_to_json(const SteeringResult<S>& result) {
  Json trace = Json::array();
  for (const auto& st : result.stages) trace.push_back(stage_to_json(st));
  return Json{{"word", word_to_json(result.word)},
              {"target", vector_to_json(result.target)},
              {"achieved", vector_to_json(result.achieved)},
              {"error", format_real(result.error)},
              {"error_bound", format_real(result.error_bound)},
              {"surrogate_first", result.surrogate_first},
              {"nodes", result.nodes},
              {"trace", trace}};
}

Json coverage_to_json(const CoverageReport& report) {
  Json box = Json::array();
  for (const auto& axis : report.box) box.push_back(interval_to_json(axis));
  Json misses = Json::array();
  for (const auto& m : report.misses) misses.push_back(real_list(m));
  return Json{{"box", box},
              {"cell", format_real(report.cell)},
              {"cells_total", report.cells_total},
              {"cells_hit", report.cells_hit},
              {"fraction", rational_to_json(report.fraction)},
              {"misses", misses}};
}

Json lemmas_to_json(const LemmaReport& report) {
  Json one = Json::array();
  for (const auto& p : report.lemma1) {
    Json witnesses = Json::array();
    for (const auto& [m, n] : p.witnesses) witnesses.push_back(Json::array({m, n}));
    one.push_back(Json{{"pair", p.a_label},
                       {"bounded_pair", p.c_label},
                       {"enumerated", p.enumerated},
                       {"violations", p.violations},
                       {"witnesses", witnesses},
                       {"threshold", p.threshold},
                       {"max_beyond_threshold", format_real(p.max_beyond, kReportDigits)},
                       {"passed", p.passed},
                       {"detail", p.detail}});
  }
  Json out{{"passed", report.passed()}, {"lemma1", one}};
  if (report.lemma2) {
    const auto& r = *report.lemma2;
    out["lemma2"] = Json{{"lambda", format_real(r.lambda, kReportDigits)},
                         {"depth", r.depth},
                         {"violations", r.violations},
                         {"witnesses", r.witnesses},
                         {"worst_ratio", format_real(r.worst_ratio, kReportDigits)},
                         {"passed", r.passed}};
  }
  if (report.lemma3) {
    const auto& r = *report.lemma3;
    out["lemma3"] = Json{{"rate", format_real(r.rate, kReportDigits)},
                         {"C", format_real(r.C, kReportDigits)},
                         {"depth", r.depth},
                         {"violations", r.violations},
                         {"witnesses", r.witnesses},
                         {"worst_ratio", format_real(r.worst_ratio, kReportDigits)},
                         {"block_identity_error", format_real(r.block_identity_error, kReportDigits)},
                         {"passed", r.passed}};
  }
  return out;
}

template <class S>
Json density_to_json(const DensitySummary<S>& summary) {
  Json outcomes = Json::array();
  for (const auto& o : summary.outcomes) {
    Json entry{{"target", vector_to_json(o.target, kReportDigits)}, {"found", o.found}};
    if (o.found) {
      entry["word"] = word_to_json(o.word);
      entry["error"] = format_real(o.error, kReportDigits);
      entry["reverified"] = o.reverified;
    }
    if (!o.failure.empty()) entry["failure"] = o.failure;
    outcomes.push_back(entry);
  }
  return Json{{"total", summary.total},
              {"successes", summary.successes},
              {"fraction", rational_to_json(summary.fraction)},
              {"max_error", format_real(summary.max_error, kReportDigits)},
              {"max_stages", summary.max_stages},
              {"max_exponent", summary.max_exponent},
              {"max_total_exponent", summary.max_total_exponent},
              {"reverify_failures", summary.reverify_failures},
              {"outcomes", outcomes}};
}

Json quadrant_to_json(const QuadrantReport& report) {
  return Json{{"coverage", coverage_to_json(report.coverage)},
              {"positivity",
               Json{{"points", report.positivity.points},
                    {"outside_closed_quadrant", report.positivity.outside},
                    {"not_strictly_positive", report.positivity.nonpositive}}},
              {"passed", report.passed}};
}

template <class S>
Json cloud_to_json(const PointCloud<S>& cloud) {
  Json points = Json::array();
  for (const auto& p : cloud.points) points.push_back(vector_to_json(p));
  Json out{{"field", to_string(cloud.field)}, {"dimension", cloud.dimension}, {"points", points}};
  if (!cloud.words.empty()) {
    Json words = Json::array();
    for (const auto& w : cloud.words) words.push_back(word_to_json(w));
    out["words"] = words;
  }
  return out;
}

template <class S>
std::string cloud_to_csv(const PointCloud<S>& cloud) {
  std::ostringstream out;
  for (Index i = 0; i < cloud.dimension; ++i) {
    if (i > 0) out << ',';
    if constexpr (std::is_same_v<S, Real>) {
      out << 'x' << i + 1;
    } else {
      out << "re" << i + 1 << ",im" << i + 1;
    }
  }
  out << '\n';
  for (const auto& p : cloud.points) {
    const auto axes = real_axes(p);
    for (std::size_t i = 0; i < axes.size(); ++i) out << (i > 0 ? "," : "") << format_real(axes[i]);
    out << '\n';
  }
  return out.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedInput, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "failed writing " + path);
}

#define HYPERORBIT_INSTANTIATE(S)                                         \
  template SystemDocument to_document(const SemigroupSystem<S>&);         \
  template SystemDocument to_document(const AffineSystem<S>&);            \
  template SemigroupSystem<S> semigroup_of(const SystemDocument&);        \
  template AffineSystem<S> affine_of(const SystemDocument&);              \
  template Json vector_to_json(const Vector<S>&, unsigned);               \
  template Json steering_to_json(const SteeringResult<S>&);               \
  template Json density_to_json(const DensitySummary<S>&);                \
  template Json cloud_to_json(const PointCloud<S>&);                      \
  template std::string cloud_to_csv(const PointCloud<S>&);

HYPERORBIT_INSTANTIATE(Real)
HYPERORBIT_INSTANTIATE(Complex)

#undef HYPERORBIT_INSTANTIATE

}  // namespace hyperorbit
