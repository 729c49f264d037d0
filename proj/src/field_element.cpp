#include "hyperorbit/field_element.hpp"

#include <limits>

namespace hyperorbit {

namespace {

// Exact moduli are dropped once they would exceed this many bits; the
// certification only needs them for the generator entries themselves.
constexpr std::size_t kMaxExactBits = 1 << 14;

std::size_t bit_size(const Rational& q) {
  const Integer num = mp::abs(mp::numerator(q));
  const Integer den = mp::denominator(q);
  std::size_t bits = 0;
  if (num != 0) bits += mp::msb(num) + 1;
  bits += mp::msb(den) + 1;
  return bits;
}

Real log_of(const Rational& positive) {
  return mp::log(to_real(positive));
}

Real neg_infinity() { return -std::numeric_limits<Real>::infinity(); }

}  // namespace

FieldElement FieldElement::zero(Field field) {
  FieldElement x{Raw{}};
  x.field_ = field;
  x.zero_ = true;
  x.log_mag_ = neg_infinity();
  x.sign_ = 1;
  x.angle_ = 0;
  x.exact_modulus_ = Rational(0);
  return x;
}

FieldElement FieldElement::from_rational(const Rational& value, Field field) {
  if (value == 0) return zero(field);
  FieldElement x{Raw{}};
  x.field_ = field;
  x.zero_ = false;
  x.sign_ = value < 0 ? -1 : 1;
  x.exact_modulus_ = mp::abs(value);
  x.log_mag_ = log_of(*x.exact_modulus_);
  x.angle_ = x.sign_ < 0 ? pi() : Real(0);
  return x;
}

FieldElement FieldElement::from_real(const Real& value, Field field) {
  if (value == 0) return zero(field);
  FieldElement x{Raw{}};
  x.field_ = field;
  x.zero_ = false;
  x.sign_ = value < 0 ? -1 : 1;
  x.log_mag_ = mp::log(mp::abs(value));
  x.angle_ = x.sign_ < 0 ? pi() : Real(0);
  return x;
}

FieldElement FieldElement::from_complex(const Complex& value) {
  if (hyperorbit::is_zero(value)) return zero(Field::Complex);
  FieldElement x{Raw{}};
  x.field_ = Field::Complex;
  x.zero_ = false;
  x.log_mag_ = mp::log(std::abs(value));
  x.angle_ = wrap_angle(mp::atan2(value.imag(), value.real()));
  return x;
}

FieldElement FieldElement::from_modulus_arg(const Rational& modulus, const Real& arg) {
  if (modulus < 0) throw Error(ErrorCode::InvalidArgument, "modulus must be nonnegative");
  if (modulus == 0) return zero(Field::Complex);
  FieldElement x{Raw{}};
  x.field_ = Field::Complex;
  x.zero_ = false;
  x.exact_modulus_ = modulus;
  x.log_mag_ = log_of(modulus);
  x.angle_ = wrap_angle(arg);
  return x;
}

FieldElement FieldElement::from_log_polar(Field field, const Real& log_mag, const Real& phase) {
  if (field == Field::Real) {
    const Real wrapped = wrap_angle(phase);
    const bool negative = mp::abs(wrapped - pi()) < mp::abs(wrapped) &&
                          mp::abs(wrapped - pi()) < mp::abs(wrapped - two_pi());
    return from_log_sign(log_mag, negative ? -1 : 1);
  }
  if (mp::isinf(log_mag) && log_mag < 0) return zero(field);
  FieldElement x{Raw{}};
  x.field_ = Field::Complex;
  x.zero_ = false;
  x.log_mag_ = log_mag;
  x.angle_ = wrap_angle(phase);
  return x;
}

FieldElement FieldElement::from_log_sign(const Real& log_mag, int sign) {
  if (mp::isinf(log_mag) && log_mag < 0) return zero(Field::Real);
  FieldElement x{Raw{}};
  x.field_ = Field::Real;
  x.zero_ = false;
  x.log_mag_ = log_mag;
  x.sign_ = sign < 0 ? -1 : 1;
  x.angle_ = x.sign_ < 0 ? pi() : Real(0);
  return x;
}

Real FieldElement::arg() const {
  if (zero_) return Real(0);
  if (field_ == Field::Complex) return angle_;
  return sign_ < 0 ? pi() : Real(0);
}

std::optional<Rational> FieldElement::exact_real() const {
  if (!exact_modulus_) return std::nullopt;
  if (field_ == Field::Complex) {
    if (zero_) return Rational(0);
    if (angle_ == 0) return *exact_modulus_;
    return std::nullopt;
  }
  return sign_ < 0 ? Rational(-*exact_modulus_) : *exact_modulus_;
}

Real FieldElement::modulus() const {
  if (zero_) return Real(0);
  if (exact_modulus_) return hyperorbit::to_real(*exact_modulus_);
  return mp::exp(log_mag_);
}

Real FieldElement::to_real() const {
  if (field_ == Field::Complex && !zero_ && angle_ != 0) {
    throw Error(ErrorCode::InvalidArgument, "complex element has no real value");
  }
  const Real m = modulus();
  return sign_ < 0 ? Real(-m) : m;
}

Complex FieldElement::to_complex() const {
  if (zero_) return Complex(Real(0), Real(0));
  const Real m = modulus();
  if (field_ == Field::Real) return Complex(sign_ < 0 ? Real(-m) : m, Real(0));
  if (angle_ == 0) return Complex(m, Real(0));
  return Complex(m * mp::cos(angle_), m * mp::sin(angle_));
}

FieldElement FieldElement::operator*(const FieldElement& other) const {
  const Field field =
      (field_ == Field::Complex || other.field_ == Field::Complex) ? Field::Complex : Field::Real;
  if (zero_ || other.zero_) return zero(field);
  FieldElement x{Raw{}};
  x.field_ = field;
  x.zero_ = false;
  x.log_mag_ = log_mag_ + other.log_mag_;
  x.sign_ = sign_ * other.sign_;
  if (field == Field::Complex) {
    x.angle_ = wrap_angle(arg() + other.arg());
  } else {
    x.angle_ = x.sign_ < 0 ? pi() : Real(0);
  }
  if (exact_modulus_ && other.exact_modulus_) {
    Rational product = *exact_modulus_ * *other.exact_modulus_;
    if (bit_size(product) <= kMaxExactBits) x.exact_modulus_ = product;
  }
  return x;
}

FieldElement FieldElement::inverse() const {
  if (zero_) throw Error(ErrorCode::ZeroModulus, "inverse of zero");
  FieldElement x = *this;
  x.log_mag_ = -log_mag_;
  if (field_ == Field::Complex) x.angle_ = wrap_angle(-angle_);
  if (exact_modulus_) x.exact_modulus_ = Rational(1) / *exact_modulus_;
  return x;
}

FieldElement FieldElement::operator/(const FieldElement& other) const {
  return *this * other.inverse();
}

FieldElement FieldElement::operator-() const {
  if (zero_) return *this;
  FieldElement x = *this;
  x.sign_ = -sign_;
  if (field_ == Field::Complex) {
    x.angle_ = wrap_angle(angle_ + pi());
  } else {
    x.angle_ = x.sign_ < 0 ? pi() : Real(0);
  }
  return x;
}

FieldElement FieldElement::pow(std::int64_t exponent) const {
  if (exponent == 0) return from_rational(Rational(1), field_);
  if (zero_) {
    if (exponent < 0) throw Error(ErrorCode::ZeroModulus, "negative power of zero");
    return *this;
  }
  FieldElement x = *this;
  x.log_mag_ = log_mag_ * exponent;
  x.sign_ = (sign_ < 0 && (exponent % 2 != 0)) ? -1 : 1;
  if (field_ == Field::Complex) {
    x.angle_ = wrap_angle(angle_ * exponent);
  } else {
    x.angle_ = x.sign_ < 0 ? pi() : Real(0);
  }
  x.exact_modulus_.reset();
  if (exact_modulus_) {
    const std::uint64_t magnitude = exponent < 0 ? static_cast<std::uint64_t>(-exponent)
                                                 : static_cast<std::uint64_t>(exponent);
    if (bit_size(*exact_modulus_) * magnitude <= kMaxExactBits) {
      const Integer num = mp::pow(mp::numerator(*exact_modulus_), static_cast<unsigned>(magnitude));
      const Integer den =
          mp::pow(mp::denominator(*exact_modulus_), static_cast<unsigned>(magnitude));
      x.exact_modulus_ = exponent > 0 ? Rational(num, den) : Rational(den, num);
    }
  }
  return x;
}

FieldElement FieldElement::as_field(Field field) const {
  if (field == field_) return *this;
  if (field == Field::Complex) {
    FieldElement x = *this;
    x.field_ = Field::Complex;
    x.angle_ = arg();
    return x;
  }
  if (!zero_ && angle_ != 0 && angle_ != pi()) {
    throw Error(ErrorCode::InvalidArgument, "element is not real");
  }
  FieldElement x = *this;
  x.field_ = Field::Real;
  return x;
}

}  // namespace hyperorbit
