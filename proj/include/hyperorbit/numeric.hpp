#pragma once

// Extended-precision scalar plumbing shared by every module.
//
// Real is an MPFR float whose precision is taken from the thread's default
// precision at construction time. MPFR keeps a binary exponent range of
// roughly +-2^30, so quantities such as 27^100000 or 2^(-k^2) stay finite
// without any rescaling on our side.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hyperorbit {

namespace mp = boost::multiprecision;

using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using Complex = std::complex<Real>;
using Integer = mp::mpz_int;
using Rational = mp::mpq_rational;

inline constexpr unsigned kDefaultDigits = 128;

enum class Field { Real, Complex };

std::string to_string(Field field);
Field field_from_string(std::string_view text);

template <class S>
struct field_of;
template <>
struct field_of<Real> {
  static constexpr Field value = Field::Real;
};
template <>
struct field_of<Complex> {
  static constexpr Field value = Field::Complex;
};
template <class S>
inline constexpr Field field_of_v = field_of<S>::value;

enum class ErrorCode {
  InvalidArgument,
  MalformedInput,
  ZeroModulus,
  UnitModulusDenominator,
  Incomparable,
  NotCertified,
  NotFound,
  DimensionMismatch,
  SpectralOrderViolation,
  StageOutOfRange,
  SingularAminusI,
  PrecViolation,
  ZeroFirstCoordinate,
  SeedFirstCoordinateZero,
  PhiDivergence,
  BudgetExceeded,
  NotValidated,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Sets the working precision (decimal digits) for the current thread and
/// restores the previous one on destruction.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

unsigned working_digits();

/// Decimal comparison tolerances: nonzeroness (tau_zero) and the strictness
/// margin of the generating-pair order (delta_cmp).
struct Tolerances {
  std::string tau_zero = "1e-40";
  std::string delta_cmp = "1e-30";
};

/// Overrides the tolerances for the current thread until destruction.
class ToleranceScope {
 public:
  explicit ToleranceScope(Tolerances tolerances);
  ~ToleranceScope();
  ToleranceScope(const ToleranceScope&) = delete;
  ToleranceScope& operator=(const ToleranceScope&) = delete;

 private:
  Tolerances saved_;
};

const Tolerances& current_tolerances();

/// Copies `x` into a value carrying the current working precision.
Real promote(const Real& x);
Complex promote(const Complex& z);

/// Parses "12", "-0.0625", "1e-3", "3.5E+2" or "p/q" into an exact rational.
Rational parse_rational(std::string_view text);

/// Parses a decimal string directly at the working precision (no exactness).
Real parse_real(std::string_view text);

Real to_real(const Rational& q);
Real to_real(const Integer& z);

/// Scientific decimal with `digits` significant digits; digits = 0 picks
/// enough digits to reproduce the binary value exactly on re-parse.
std::string format_real(const Real& x, unsigned digits = 0);

/// Canonical text for a rational: a terminating decimal when the
/// denominator is of the form 2^a 5^b, otherwise "p/q".
std::string format_rational(const Rational& q);

const Real& pi();
const Real& two_pi();

/// Reduces an angle into [0, 2 pi).
Real wrap_angle(const Real& theta);

Real magnitude(const Real& x);
Real magnitude(const Complex& z);

/// Cheap ordering key proportional to |x| within a factor of sqrt(2).
Real magnitude_key(const Real& x);
Real magnitude_key(const Complex& z);

inline bool is_zero(const Real& x) { return x == 0; }
inline bool is_zero(const Complex& z) { return z.real() == 0 && z.imag() == 0; }

/// Smallest relative spacing at the working precision.
Real unit_roundoff();

template <class S>
S int_pow(S base, std::uint64_t exponent) {
  S result(1);
  while (exponent != 0) {
    if (exponent & 1U) result *= base;
    exponent >>= 1U;
    if (exponent != 0) base *= base;
  }
  return result;
}

/// Sums terms after ordering them by decreasing magnitude.
template <class S>
S ordered_sum(std::vector<S> terms);

}  // namespace hyperorbit
