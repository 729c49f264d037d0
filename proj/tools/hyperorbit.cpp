#include "hyperorbit/run_config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <random>

using namespace hyperorbit;

namespace {

enum Exit : int {
  kOk = 0,
  kCheckFailed = 2,
  kNotFound = 3,
  kUsage = 64,
  kMalformed = 65,
};

constexpr std::size_t kSvgPointCap = 20000;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config_file;
  std::optional<unsigned> precision;
  std::optional<std::string> eps;
  std::optional<std::int64_t> budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> depth;
  std::optional<std::string> out;
  std::optional<std::string> svg;
};

RunConfig effective_config(const Flags& flags) {
  RunConfig config = base_config();
  if (flags.precision) config.precision_digits = *flags.precision;
  if (flags.eps) config.eps = *flags.eps;
  if (flags.budget) config.max_exponent = *flags.budget;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.depth) config.lemma_depth = *flags.depth;
  if (flags.out) config.out = *flags.out;
  if (flags.svg) config.svg = *flags.svg;
  if (!flags.config_file.empty()) config.merge(Json::parse(read_text_file(flags.config_file)));
  config.check();
  return config;
}

void emit(const RunConfig& config, const std::string& text) {
  if (config.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(config.out, text);
  }
}

Json envelope(const RunConfig& config, const std::string& command) {
  return Json{{"command", command}, {"config", config.to_json()}};
}

SystemDocument load_system(const std::string& path) { return system_from_text(read_text_file(path)); }

// "1.5,-2" for real targets; entries may be "re:im" for complex ones.
template <class S>
Vector<S> parse_target(const std::string& text, Index n) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    parts.push_back(text.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (static_cast<Index>(parts.size()) != n) {
    throw UsageError("target has " + std::to_string(parts.size()) + " entries, system dimension is " +
                     std::to_string(n));
  }
  Vector<S> y(n);
  for (Index i = 0; i < n; ++i) {
    const std::string& part = parts[static_cast<std::size_t>(i)];
    const std::size_t colon = part.find(':');
    try {
      const Real re = parse_real(part.substr(0, colon));
      const Real im = colon == std::string::npos ? Real(0) : parse_real(part.substr(colon + 1));
      if constexpr (std::is_same_v<S, Real>) {
        if (im != 0) throw UsageError("complex target entry for a real system");
        y(i) = re;
      } else {
        y(i) = Complex(re, im);
      }
    } catch (const Error&) {
      throw UsageError("bad target entry '" + part + "'");
    }
  }
  return y;
}

template <class S>
Vector<S> elements_vector(const ElementVector& v, Index n) {
  Vector<S> out(n);
  for (Index i = 0; i < n; ++i) {
    out(i) = v.empty() ? S(Real(0)) : v[static_cast<std::size_t>(i)].template to<S>();
  }
  return out;
}

std::vector<Interval> cube(const std::string& lo, const std::string& hi, std::size_t axes) {
  return std::vector<Interval>(axes, Interval{parse_real(lo), parse_real(hi)});
}

// Grid points lo, lo + step, ... <= hi along every real axis.
std::vector<std::vector<Real>> grid(const RunConfig& config, std::size_t axes) {
  const Rational lo = parse_rational(config.target_lo);
  const Rational hi = parse_rational(config.target_hi);
  const Rational step = parse_rational(config.target_step);
  std::vector<Real> line;
  for (Rational x = lo; x <= hi; x += step) line.push_back(to_real(x));
  std::vector<std::vector<Real>> out{{}};
  for (std::size_t a = 0; a < axes; ++a) {
    std::vector<std::vector<Real>> next;
    for (const auto& prefix : out) {
      for (const auto& x : line) {
        next.push_back(prefix);
        next.back().push_back(x);
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<std::vector<Real>> random_points(const RunConfig& config, std::size_t axes) {
  std::mt19937_64 rng(config.seed);
  const Real lo = parse_real(config.target_lo);
  const Real width = parse_real(config.target_hi) - lo;
  std::vector<std::vector<Real>> out;
  for (std::int64_t t = 0; t < config.random_targets; ++t) {
    std::vector<Real> p;
    for (std::size_t a = 0; a < axes; ++a) {
      // 53 random bits scaled exactly; no library distribution involved
      const Real u = mp::ldexp(Real(static_cast<unsigned long long>(rng() >> 11)), -53);
      p.push_back(lo + width * u);
    }
    out.push_back(std::move(p));
  }
  return out;
}

template <class S>
Vector<S> from_axes(const std::vector<Real>& axes) {
  if constexpr (std::is_same_v<S, Real>) {
    Vector<S> v(static_cast<Index>(axes.size()));
    for (std::size_t i = 0; i < axes.size(); ++i) v(static_cast<Index>(i)) = axes[i];
    return v;
  } else {
    Vector<S> v(static_cast<Index>(axes.size() / 2));
    for (Index i = 0; i < v.size(); ++i) v(i) = Complex(axes[2 * i], axes[2 * i + 1]);
    return v;
  }
}

std::size_t axes_per_entry(Field field) { return field == Field::Complex ? 2 : 1; }

void write_svg(const RunConfig& config, const std::vector<std::vector<Real>>& points,
               const std::vector<Interval>& box) {
  if (config.svg.empty()) return;
  if (box.size() > 2) throw UsageError("SVG output needs a 1-D or 2-D cloud");
  write_text_file(config.svg, svg_scatter(points, box));
}

int cmd_construct(const RunConfig& config, const std::string& family, int n,
                  const QuadrantParameters& quadrant) {
  PrecisionScope scope(config.precision_digits);
  ToleranceScope tolerances(config.tolerances());
  SystemDocument doc;
  ValidationReport report;
  if (family == "real-example" || family == "complex-example") {
    if (n < 1) throw UsageError("n must be at least 1");
    if (family == "real-example") {
      const auto sys = build_real_example(n);
      doc = to_document(sys);
      report = *sys.validation();
    } else {
      const auto sys = build_complex_example(n);
      doc = to_document(sys);
      report = *sys.validation();
    }
  } else if (family == "quadrant") {
    auto [sys, quadrant_report] = build_quadrant_example(quadrant);
    doc = to_document(sys);
    report = quadrant_report;
  } else if (family == "affine-1d") {
    const auto sys = build_affine_example();
    doc = to_document(sys);
    report = *sys.validation();
  } else {
    throw UsageError("unknown family '" + family + "'");
  }
  doc.metadata["run_config"] = config.to_json().dump();
  emit(config, dump(system_to_json(doc)));
  if (!report.accepted) {
    std::cerr << dump(validation_to_json(report));
    return kCheckFailed;
  }
  return kOk;
}

bool is_quadrant(const SystemDocument& doc) {
  return doc.metadata.count("family") && doc.metadata.at("family") == "quadrant";
}

// Quadrant files carry A = [[a, 0], [b, d]], B = diag(u, v) and are checked
// against the quadrant hypotheses instead of the density theorem.
ValidationReport quadrant_report(const SystemDocument& doc) {
  if (doc.field != Field::Real || doc.affine || doc.n() != 2 || !doc.a[0][1].is_zero()) {
    throw Error(ErrorCode::MalformedInput, "quadrant files need a real 2 x 2 lower-triangular A");
  }
  auto exact = [](const FieldElement& x) {
    const auto q = x.exact_real();
    if (!q) throw Error(ErrorCode::MalformedInput, "quadrant parameters must be exact");
    return *q;
  };
  const QuadrantParameters params{exact(doc.a[0][0]), exact(doc.a[1][0]), exact(doc.a[1][1]),
                                  exact(doc.b[0]), exact(doc.b[1])};
  return build_quadrant_example(params).second;
}

template <class S>
ValidationReport validate_document(const SystemDocument& doc) {
  if (is_quadrant(doc)) return quadrant_report(doc);
  if (doc.affine) return *affine_of<S>(doc).validated().validation();
  return *semigroup_of<S>(doc).validated().validation();
}

int cmd_validate(const RunConfig& config, const std::string& path) {
  const SystemDocument doc = load_system(path);
  PrecisionScope scope(config.precision_digits);
  ToleranceScope tolerances(config.tolerances());
  const ValidationReport report =
      doc.field == Field::Real ? validate_document<Real>(doc) : validate_document<Complex>(doc);
  Json out = envelope(config, "validate");
  out["system"] = path;
  out["report"] = validation_to_json(report);
  emit(config, dump(out));
  return report.accepted ? kOk : kCheckFailed;
}

template <class S>
int steer(const RunConfig& config, const SystemDocument& doc, const std::string& target_text) {
  const Real eps = parse_real(config.eps);
  const Vector<S> y = parse_target<S>(target_text, doc.n());
  Json out = envelope(config, "steer");
  try {
    SteeringResult<S> result;
    if (doc.affine) {
      const auto sys = affine_of<S>(doc).validated();
      if (!sys.accepted()) {
        std::cerr << dump(validation_to_json(*sys.validation()));
        return kCheckFailed;
      }
      result = steer_affine(sys, elements_vector<S>(doc.seed, doc.n()), y, eps, config.budget());
    } else {
      const auto sys = semigroup_of<S>(doc).validated();
      if (!sys.accepted()) {
        std::cerr << dump(validation_to_json(*sys.validation()));
        return kCheckFailed;
      }
      result = synthesize_word(sys, y, eps, config.budget());
    }
    out["result"] = steering_to_json(result);
    emit(config, dump(out));
    return kOk;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFound && e.code() != ErrorCode::BudgetExceeded) throw;
    out["not_found"] = e.what();
    emit(config, dump(out));
    std::cerr << e.what() << "\n";
    return kNotFound;
  }
}

int cmd_steer(const RunConfig& config, const std::string& path, const std::string& target) {
  const SystemDocument doc = load_system(path);
  PrecisionScope scope(config.precision_digits);
  ToleranceScope tolerances(config.tolerances());
  return doc.field == Field::Real ? steer<Real>(config, doc, target) : steer<Complex>(config, doc, target);
}

template <class S>
int verify(const RunConfig& config, const SystemDocument& doc, const std::string& suite) {
  if (doc.affine) throw UsageError("verify suites run on linear systems");
  const auto sys = semigroup_of<S>(doc).validated();
  const ValidationReport validation = validate_document<S>(doc);
  Json out = envelope(config, "verify");
  out["suite"] = suite;
  out["validation"] = validation_to_json(validation);
  bool passed = validation.accepted;
  const std::size_t axes = axes_per_entry(doc.field) * static_cast<std::size_t>(doc.n());

  if (suite == "lemmas") {
    const auto report = verify_lemmas(sys, config.lemma_depth);
    out["report"] = lemmas_to_json(report);
    passed = passed && report.passed();
  } else if (suite == "density") {
    if (!sys.accepted()) {
      out["report"] = "density runs need a system satisfying the steering hypotheses";
      passed = false;
    } else {
      std::vector<Vector<S>> targets;
      const auto points = config.random_targets > 0 ? random_points(config, axes) : grid(config, axes);
      for (const auto& p : points) targets.push_back(from_axes<S>(p));
      const auto summary = density_experiment(sys, targets, parse_real(config.eps), config.budget());
      out["report"] = density_to_json(summary);
      passed = passed && summary.successes == summary.total;
      if (!config.svg.empty()) {
        std::vector<std::vector<Real>> achieved;
        for (const auto& o : summary.outcomes) {
          if (o.found) achieved.push_back(real_axes(evaluate_word(sys, o.word, sys.seed())));
        }
        write_svg(config, achieved, cube(config.target_lo, config.target_hi, axes));
      }
    }
  } else if (suite == "coverage") {
    const WordShape shape{config.stages, config.k_max, config.l_max};
    const auto box = cube(config.box_lo, config.box_hi, axes);
    CoverageCounter counter(box, parse_real(config.cell));
    PositivityReport positivity;
    std::vector<std::vector<Real>> sample;
    enumerate_orbit<S>(
        sys, sys.seed(), shape,
        [&](const OrbitWord&, const Vector<S>& x) {
          const auto coords = real_axes(x);
          ++positivity.points;
          bool negative = false;
          bool nonpositive = false;
          for (const auto& c : coords) {
            negative = negative || c < 0;
            nonpositive = nonpositive || c <= 0;
          }
          positivity.outside += negative ? 1 : 0;
          positivity.nonpositive += nonpositive ? 1 : 0;
          counter.add(coords);
          bool inside = true;
          for (std::size_t i = 0; i < coords.size(); ++i) inside = inside && coords[i] >= box[i].lo && coords[i] <= box[i].hi;
          if (inside && sample.size() < kSvgPointCap) sample.push_back(coords);
        },
        config.max_words);
    const auto report = counter.report();
    const bool covered = report.fraction >= parse_rational(config.min_coverage);
    const bool quadrant = is_quadrant(doc);
    out["report"] = Json{{"coverage", coverage_to_json(report)},
                         {"positivity",
                          Json{{"points", positivity.points},
                               {"outside_closed_quadrant", positivity.outside},
                               {"not_strictly_positive", positivity.nonpositive},
                               {"required", quadrant}}},
                         {"coverage_met", covered}};
    passed = passed && covered && (!quadrant || positivity.nonpositive == 0);
    write_svg(config, sample, box);
  } else {
    throw UsageError("unknown suite '" + suite + "'");
  }
  out["passed"] = passed;
  emit(config, dump(out));
  return passed ? kOk : kCheckFailed;
}

int cmd_verify(const RunConfig& config, const std::string& path, const std::string& suite) {
  const SystemDocument doc = load_system(path);
  PrecisionScope scope(config.precision_digits);
  ToleranceScope tolerances(config.tolerances());
  return doc.field == Field::Real ? verify<Real>(config, doc, suite) : verify<Complex>(config, doc, suite);
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::MalformedInput:
      return kMalformed;
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
      return kUsage;
    case ErrorCode::NotFound:
    case ErrorCode::BudgetExceeded:
      return kNotFound;
    default:
      return kCheckFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbit steering and density checks for two-generator matrix semigroups"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config_file, "JSON run config; its fields override flags")
      ->check(CLI::ExistingFile);
  app.add_option("--precision", flags.precision, "working precision in decimal digits");
  app.add_option("--out", flags.out, "output file (default: stdout)");

  std::string family;
  int n = 1;
  QuadrantParameters quadrant;
  std::string qa, qb, qd, qu, qv;
  auto* construct = app.add_subcommand("construct", "write a built-in system file");
  construct->add_option("family", family, "real-example | complex-example | quadrant | affine-1d")
      ->required();
  construct->add_option("n,--n", n, "dimension of the example families");
  construct->add_option("--a", qa, "quadrant parameter a");
  construct->add_option("--b", qb, "quadrant parameter b");
  construct->add_option("--d", qd, "quadrant parameter d");
  construct->add_option("--u", qu, "quadrant parameter u");
  construct->add_option("--v", qv, "quadrant parameter v");

  std::string system_path;
  auto* validate = app.add_subcommand("validate", "check the hypotheses of a system file");
  validate->add_option("system", system_path, "system file")->required();

  std::string target;
  auto* steer_cmd = app.add_subcommand("steer", "synthesize a word reaching a target");
  steer_cmd->add_option("system", system_path, "system file")->required();
  steer_cmd->add_option("--target", target, "comma-separated entries; complex entries as re:im")->required();
  steer_cmd->add_option("--eps", flags.eps, "sup-norm tolerance");
  steer_cmd->add_option("--budget", flags.budget, "per-stage exponent cap");

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  verify_cmd->add_option("system", system_path, "system file")->required();
  verify_cmd->add_option("--suite", suite, "lemmas | density | coverage")
      ->required()
      ->check(CLI::IsMember({"lemmas", "density", "coverage"}));
  verify_cmd->add_option("--svg", flags.svg, "scatter plot of a 1-D or 2-D cloud");
  verify_cmd->add_option("--eps", flags.eps, "sup-norm tolerance for the density suite");
  verify_cmd->add_option("--budget", flags.budget, "per-stage exponent cap");
  verify_cmd->add_option("--seed", flags.seed, "seed for random targets");
  verify_cmd->add_option("--depth", flags.depth, "lemma depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    RunConfig config;
    try {
      config = effective_config(flags);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::MalformedInput, std::string("config file: ") + e.what());
    }
    if (*construct) {
      for (const auto& [text, field] : {std::pair{&qa, &quadrant.a}, {&qb, &quadrant.b}, {&qd, &quadrant.d},
                                        {&qu, &quadrant.u}, {&qv, &quadrant.v}}) {
        if (text->empty()) continue;
        try {
          *field = parse_rational(*text);
        } catch (const Error&) {
          throw UsageError("bad quadrant parameter '" + *text + "'");
        }
      }
      return cmd_construct(config, family, n, quadrant);
    }
    if (*validate) return cmd_validate(config, system_path);
    if (*steer_cmd) return cmd_steer(config, system_path, target);
    return cmd_verify(config, system_path, suite);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_for(e);
  }
}
