#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace rescore {

/// Exact dyadic rational `numerator * 2^exponent`.
///
/// Grid coordinates, voxel volumes and prescribed cluster weights all live in
/// this set, so weight bookkeeping (feasibility, divisibility by a voxel
/// volume) is carried out without rounding.  Values are kept normalized: the
/// numerator is odd unless it is zero, in which case the exponent is zero.
class Dyadic {
 public:
  constexpr Dyadic() = default;
  Dyadic(std::int64_t numerator, int exponent);

  static Dyadic pow2(int exponent) { return Dyadic(1, exponent); }

  /// Exact conversion of a finite double. Every finite double is dyadic;
  /// throws std::invalid_argument for NaN or infinity.
  static Dyadic from_double(double value);

  std::int64_t numerator() const { return numerator_; }
  int exponent() const { return exponent_; }
  bool is_zero() const { return numerator_ == 0; }

  double to_double() const;

  /// True iff `*this == m * unit` for some integer m >= 0 (unit must be > 0).
  bool is_multiple_of(const Dyadic& unit) const;

  /// `*this / unit` as an integer; requires is_multiple_of(unit).
  std::int64_t multiples_of(const Dyadic& unit) const;

  /// Numerator of `*this` over the common denominator 2^-exponent, i.e.
  /// `*this * 2^-exponent`; requires the result to be an integer.
  std::int64_t scaled_numerator(int exponent) const;

  Dyadic operator+(const Dyadic& other) const;
  Dyadic operator-(const Dyadic& other) const;
  Dyadic operator*(const Dyadic& other) const;

  bool operator==(const Dyadic& other) const = default;
  std::strong_ordering operator<=>(const Dyadic& other) const;

  std::string to_string() const;

 private:
  std::int64_t numerator_ = 0;
  int exponent_ = 0;
};

}  // namespace rescore
