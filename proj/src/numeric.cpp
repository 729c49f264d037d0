#include "hyperorbit/numeric.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>

namespace hyperorbit {

std::string to_string(Field field) { return field == Field::Real ? "real" : "complex"; }

Field field_from_string(std::string_view text) {
  if (text == "real") return Field::Real;
  if (text == "complex") return Field::Complex;
  throw Error(ErrorCode::MalformedInput, "unknown field '" + std::string(text) + "'");
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::ZeroModulus: return "ZeroModulus";
    case ErrorCode::UnitModulusDenominator: return "UnitModulusDenominator";
    case ErrorCode::Incomparable: return "Incomparable";
    case ErrorCode::NotCertified: return "NotCertified";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SpectralOrderViolation: return "SpectralOrderViolation";
    case ErrorCode::StageOutOfRange: return "StageOutOfRange";
    case ErrorCode::SingularAminusI: return "SingularAminusI";
    case ErrorCode::PrecViolation: return "PrecViolation";
    case ErrorCode::ZeroFirstCoordinate: return "ZeroFirstCoordinate";
    case ErrorCode::SeedFirstCoordinateZero: return "SeedFirstCoordinateZero";
    case ErrorCode::PhiDivergence: return "PhiDivergence";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotValidated: return "NotValidated";
  }
  return "Unknown";
}

PrecisionScope::PrecisionScope(unsigned digits) : saved_(Real::default_precision()) {
  if (digits == 0) throw Error(ErrorCode::InvalidArgument, "precision must be positive");
  Real::default_precision(digits);
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_); }

unsigned working_digits() { return Real::default_precision(); }

namespace {

Tolerances& tolerances_slot() {
  thread_local Tolerances current;
  return current;
}

}  // namespace

ToleranceScope::ToleranceScope(Tolerances tolerances) : saved_(tolerances_slot()) {
  parse_rational(tolerances.tau_zero);
  parse_rational(tolerances.delta_cmp);
  tolerances_slot() = std::move(tolerances);
}

ToleranceScope::~ToleranceScope() { tolerances_slot() = saved_; }

const Tolerances& current_tolerances() { return tolerances_slot(); }

Real promote(const Real& x) { return Real(x, working_digits()); }

Complex promote(const Complex& z) { return Complex(promote(z.real()), promote(z.imag())); }

namespace {

Integer parse_integer_digits(std::string_view digits) {
  // A leading zero would make the string parse as octal.
  const auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return Integer(0);
  return Integer(std::string(digits.substr(first)));
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
           return std::isdigit(static_cast<unsigned char>(c)) != 0;
         });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  auto fail = [&] {
    return Error(ErrorCode::MalformedInput, "not a number: '" + std::string(text) + "'");
  };
  if (s.empty()) throw fail();

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw fail();
    return num / den;
  }

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 9) throw fail();
    exponent = std::stoll(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) throw fail();
  if (!int_part.empty() && !all_digits(int_part)) throw fail();
  if (!frac_part.empty() && !all_digits(frac_part)) throw fail();

  Integer mantissa = parse_integer_digits(std::string(int_part) + std::string(frac_part));
  exponent -= static_cast<long long>(frac_part.size());
  if (exponent > 100000 || exponent < -100000) throw fail();
  Integer scale = mp::pow(Integer(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  Rational value = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
  return negative ? Rational(-value) : value;
}

Real parse_real(std::string_view text) { return to_real(parse_rational(text)); }

Real to_real(const Rational& q) {
  Real r;
  mpfr_set_q(r.backend().data(), q.backend().data(), MPFR_RNDN);
  return r;
}

Real to_real(const Integer& z) {
  Real r;
  mpfr_set_z(r.backend().data(), z.backend().data(), MPFR_RNDN);
  return r;
}

std::string format_real(const Real& x, unsigned digits) {
  if (digits == 0) {
    const auto bits = mpfr_get_prec(x.backend().data());
    digits = static_cast<unsigned>(std::ceil(static_cast<double>(bits) * 0.30102999566398120)) + 2;
  }
  char* buffer = nullptr;
  mpfr_asprintf(&buffer, "%.*Re", static_cast<int>(digits) - 1, x.backend().data());
  std::unique_ptr<char, decltype(&mpfr_free_str)> owned(buffer, &mpfr_free_str);
  return std::string(buffer);
}

std::string format_rational(const Rational& q) {
  Integer num = mp::numerator(q);
  Integer den = mp::denominator(q);
  if (den == 1) return num.str();
  Integer rest = den;
  unsigned twos = 0;
  unsigned fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) return num.str() + "/" + den.str();

  const unsigned places = std::max(twos, fives);
  Integer scaled = num * (mp::pow(Integer(10), places) / den);
  const bool negative = scaled < 0;
  std::string digits = (negative ? Integer(-scaled) : scaled).str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  digits.insert(digits.size() - places, ".");
  while (digits.back() == '0') digits.pop_back();
  if (digits.back() == '.') digits.pop_back();
  return negative ? "-" + digits : digits;
}

const Real& pi() {
  thread_local Real cached;
  thread_local unsigned cached_digits = 0;
  if (cached_digits != working_digits()) {
    cached = Real();
    mpfr_const_pi(cached.backend().data(), MPFR_RNDN);
    cached_digits = working_digits();
  }
  return cached;
}

const Real& two_pi() {
  thread_local Real cached;
  thread_local unsigned cached_digits = 0;
  if (cached_digits != working_digits()) {
    cached = 2 * pi();
    cached_digits = working_digits();
  }
  return cached;
}

Real wrap_angle(const Real& theta) {
  Real r = theta - two_pi() * mp::floor(theta / two_pi());
  if (r < 0) r += two_pi();
  if (r >= two_pi()) r -= two_pi();
  return r;
}

Real magnitude(const Real& x) { return mp::abs(x); }
Real magnitude(const Complex& z) { return std::abs(z); }

Real magnitude_key(const Real& x) { return mp::abs(x); }
Real magnitude_key(const Complex& z) { return mp::abs(z.real()) + mp::abs(z.imag()); }

Real unit_roundoff() {
  Real one(1);
  Real next = one;
  mpfr_nextabove(next.backend().data());
  return next - one;
}

template <class S>
S ordered_sum(std::vector<S> terms) {
  std::vector<std::pair<Real, std::size_t>> keys;
  keys.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) keys.emplace_back(magnitude_key(terms[i]), i);
  std::stable_sort(keys.begin(), keys.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  S total(0);
  for (const auto& [key, index] : keys) total += terms[index];
  return total;
}

template Real ordered_sum<Real>(std::vector<Real>);
template Complex ordered_sum<Complex>(std::vector<Complex>);

}  // namespace hyperorbit
