#include "rescore/dyadic.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rescore {
namespace {

// Shifts a normalized numerator left by `shift` bits; throws when the
// result would not fit into 63 bits.
std::int64_t checked_shift(std::int64_t value, int shift) {
  if (shift < 0) throw std::logic_error("negative shift");
  if (value == 0) return 0;
  const std::uint64_t magnitude =
      value < 0 ? -static_cast<std::uint64_t>(value) : static_cast<std::uint64_t>(value);
  if (shift >= 63 || std::bit_width(magnitude) + shift > 62) {
    throw std::overflow_error("dyadic value exceeds 62-bit range");
  }
  return value * (std::int64_t{1} << shift);
}

}  // namespace

Dyadic::Dyadic(std::int64_t numerator, int exponent) : numerator_(numerator), exponent_(exponent) {
  if (numerator_ == 0) {
    exponent_ = 0;
    return;
  }
  while ((numerator_ & 1) == 0) {
    numerator_ /= 2;
    ++exponent_;
  }
}

Dyadic Dyadic::from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("dyadic value must be finite");
  if (value == 0.0) return {};
  int exp = 0;
  const double mantissa = std::frexp(value, &exp);  // value = mantissa * 2^exp, |mantissa| in [0.5,1)
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  return Dyadic(scaled, exp - 53);
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(numerator_), exponent_); }

bool Dyadic::is_multiple_of(const Dyadic& unit) const {
  if (unit.numerator_ <= 0) throw std::invalid_argument("unit must be positive");
  if (numerator_ < 0) return false;
  if (numerator_ == 0) return true;
  // unit is odd * 2^e; *this is odd * 2^f.  Divisible iff f >= e and the
  // odd part of unit divides the odd part of *this.
  return exponent_ >= unit.exponent_ && numerator_ % unit.numerator_ == 0;
}

std::int64_t Dyadic::multiples_of(const Dyadic& unit) const {
  if (!is_multiple_of(unit)) throw std::invalid_argument("value is not a multiple of unit");
  if (numerator_ == 0) return 0;
  return checked_shift(numerator_ / unit.numerator_, exponent_ - unit.exponent_);
}

std::int64_t Dyadic::scaled_numerator(int exponent) const {
  if (numerator_ == 0) return 0;
  if (exponent_ < exponent) throw std::invalid_argument("value not representable at this scale");
  return checked_shift(numerator_, exponent_ - exponent);
}

Dyadic Dyadic::operator+(const Dyadic& other) const {
  if (is_zero()) return other;
  if (other.is_zero()) return *this;
  const int e = std::min(exponent_, other.exponent_);
  return Dyadic(checked_shift(numerator_, exponent_ - e) + checked_shift(other.numerator_, other.exponent_ - e), e);
}

Dyadic Dyadic::operator-(const Dyadic& other) const { return *this + Dyadic(-other.numerator_, other.exponent_); }

Dyadic Dyadic::operator*(const Dyadic& other) const {
  std::int64_t product = 0;
  if (__builtin_mul_overflow(numerator_, other.numerator_, &product)) {
    throw std::overflow_error("dyadic product overflow");
  }
  return Dyadic(product, exponent_ + other.exponent_);
}

std::strong_ordering Dyadic::operator<=>(const Dyadic& other) const {
  const Dyadic diff = *this - other;
  return diff.numerator_ <=> 0;
}

std::string Dyadic::to_string() const {
  return std::to_string(numerator_) + "*2^" + std::to_string(exponent_);
}

}  // namespace rescore
