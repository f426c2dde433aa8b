#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rescore/dyadic.hpp"

namespace rescore {

using Point = std::vector<double>;
using MultiIndex = std::vector<std::uint64_t>;

/// Per-axis dyadic exponents of an implicit Cartesian grid in [0,1]^d.
///
/// Axis t carries 2^exponent(t) voxel centers.  Exponent 0 is allowed and
/// means a single voxel along that axis.  Indices are zero-based; the point
/// with per-axis index j_t has coordinate (2 j_t + 1) / 2^(exponent(t)+1).
class Resolution {
 public:
  static constexpr int kMaxTotalExponent = 40;

  Resolution() = default;
  explicit Resolution(std::vector<int> exponents);

  std::size_t dim() const { return exponents_.size(); }
  int exponent(std::size_t axis) const { return exponents_.at(axis); }
  std::span<const int> exponents() const { return exponents_; }
  int total_exponent() const { return total_; }

  std::uint64_t axis_count(std::size_t axis) const { return std::uint64_t{1} << exponents_.at(axis); }
  std::uint64_t size() const { return std::uint64_t{1} << total_; }

  /// Componentwise `*this <= other`.
  bool coarser_or_equal(const Resolution& other) const;

  bool operator==(const Resolution&) const = default;

  std::string to_string() const;

 private:
  std::vector<int> exponents_;
  int total_ = 0;
};

/// Row-major flattening (last axis fastest).
std::uint64_t to_linear(const Resolution& res, std::span<const std::uint64_t> multi);
MultiIndex to_multi(const Resolution& res, std::uint64_t linear);

/// ν(ρ) = Π 2^-ρ_t, the weight of every grid point.
Dyadic voxel_volume(const Resolution& res);

/// Exact coordinate of one axis: (2j+1) 2^-(exponent+1).
Dyadic axis_coord(int exponent, std::uint64_t index);

Point point_coords(const Resolution& res, std::span<const std::uint64_t> multi);
Point point_coords(const Resolution& res, std::uint64_t linear);

/// Flat array of all grid coordinates, point-major (n * d values).
std::vector<double> grid_coordinates(const Resolution& res);

/// The merging map p: per-axis q_t = floor(j_t / 2^(ρ_t - τ_t)).
MultiIndex merge_index(const Resolution& fine, const Resolution& coarse, std::span<const std::uint64_t> j);
std::uint64_t merge_linear(const Resolution& fine, const Resolution& coarse, std::uint64_t j);

/// merge_linear for every fine index at once (entry j is p(j)).
std::vector<std::uint64_t> merge_map(const Resolution& fine, const Resolution& coarse);

struct Batch {
  std::uint64_t coarse_index = 0;
  std::vector<std::uint64_t> members;  // fine linear indices, ascending
};

/// p^-1(q): every fine index merged onto coarse index q.
Batch batch_of(const Resolution& fine, const Resolution& coarse, std::uint64_t q);

/// Centroid of a batch, evaluated from its members in exact arithmetic.
Point batch_centroid(const Resolution& fine, const Resolution& coarse, std::uint64_t q);

/// Closed form of the weighted scatter of one batch about its centroid,
///   V(τ) = ν(τ)/12 · Σ_t (2^-2τ_t - 2^-2ρ_t).
/// The value does not depend on which batch is meant.
double batch_error(const Resolution& fine, const Resolution& coarse);

struct WeightedPoint {
  Point x;
  double weight = 0.0;
};

struct Scatter {
  Point centroid;
  double value = 0.0;  // Σ ω ||x - c||^2
  double total_weight = 0.0;
};

Scatter scatter(std::span<const WeightedPoint> points);

/// Weighted points of one batch, each carrying ν(fine).
std::vector<WeightedPoint> batch_points(const Resolution& fine, const Resolution& coarse, std::uint64_t q);

struct HuygensReport {
  double cost = 0.0;         // Σ ω ||x - s||^2, summed directly
  double scatter = 0.0;      // V(Y)
  double shift = 0.0;        // (Σ ω) ||c - s||^2
  double residual = 0.0;     // |cost - scatter - shift|
};

/// Σ ω ||x - s||^2 together with its centroid decomposition.  Throws
/// std::logic_error if the two sides differ by more than 1e-12 relative.
HuygensReport huygens_cost(std::span<const WeightedPoint> points, std::span<const double> site);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace rescore
