#pragma once

#include "hyperorbit/numeric.hpp"

#include <optional>

namespace hyperorbit {

/// A nonzero (or sentinel zero) element of R or C held in log-polar form:
/// natural log of the modulus plus a sign (R) or an angle in [0, 2 pi) (C).
///
/// Products and integer powers only add or scale log_mag and phase, so they
/// never overflow no matter how large the exponents get. When the modulus is
/// known as an exact rational (decimal input, the built-in families) it is
/// carried along and used by the generating-pair certification.
class FieldElement {
 public:
  FieldElement() : FieldElement(zero(Field::Real)) {}

  static FieldElement zero(Field field);
  static FieldElement from_rational(const Rational& value, Field field = Field::Real);
  static FieldElement from_real(const Real& value, Field field = Field::Real);
  static FieldElement from_complex(const Complex& value);
  /// Complex element with an exactly known modulus.
  static FieldElement from_modulus_arg(const Rational& modulus, const Real& arg);
  static FieldElement from_log_polar(Field field, const Real& log_mag, const Real& phase);
  static FieldElement from_log_sign(const Real& log_mag, int sign);

  Field field() const { return field_; }
  bool is_zero() const { return zero_; }

  /// ln |x|; -inf for zero.
  const Real& log_mag() const { return log_mag_; }
  /// +1 or -1 (zero reports +1).
  int sign() const { return sign_; }
  /// Argument in [0, 2 pi): 0 or pi in the real field.
  Real arg() const;
  const std::optional<Rational>& exact_modulus() const { return exact_modulus_; }
  /// Exact signed value when the field is R and the modulus is exact.
  std::optional<Rational> exact_real() const;

  Real modulus() const;
  Real to_real() const;
  Complex to_complex() const;

  template <class S>
  S to() const {
    if constexpr (std::is_same_v<S, Real>) {
      return to_real();
    } else {
      return to_complex();
    }
  }

  FieldElement operator*(const FieldElement& other) const;
  FieldElement operator/(const FieldElement& other) const;
  FieldElement operator-() const;
  FieldElement inverse() const;
  FieldElement pow(std::int64_t exponent) const;
  FieldElement as_field(Field field) const;

 private:
  struct Raw {};
  explicit FieldElement(Raw) {}

  Field field_ = Field::Real;
  bool zero_ = true;
  Real log_mag_;
  int sign_ = 1;
  Real angle_;  // used for Field::Complex only
  std::optional<Rational> exact_modulus_;
};

}  // namespace hyperorbit
