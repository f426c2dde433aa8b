#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rescore/dyadic.hpp"
#include "rescore/grid.hpp"

namespace rescore {

/// Symmetric positive definite matrices A_i, one per cluster, with cached
/// extreme eigenvalues over the whole family.
class NormFamily {
 public:
  NormFamily() = default;
  /// Throws std::invalid_argument unless every matrix is square, of the same
  /// size, symmetric (residual <= 1e-12) and positive definite.
  explicit NormFamily(std::vector<Eigen::MatrixXd> matrices);

  static NormFamily identity(std::size_t k, std::size_t d);

  std::size_t size() const { return matrices_.size(); }
  std::size_t dim() const { return matrices_.empty() ? 0 : static_cast<std::size_t>(matrices_.front().rows()); }
  const Eigen::MatrixXd& matrix(std::size_t i) const { return matrices_.at(i); }
  const std::vector<Eigen::MatrixXd>& matrices() const { return matrices_; }

  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

  /// ||x - s||^2_{A_i}
  double squared_norm(std::size_t i, std::span<const double> x, std::span<const double> s) const;

 private:
  std::vector<Eigen::MatrixXd> matrices_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
};

struct EigenBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

EigenBounds eigen_bounds(const NormFamily& family);

/// A weight-constrained clustering problem on the grid X(ρ).
struct Instance {
  int k = 0;
  Resolution rho;
  std::vector<Dyadic> kappa;              // prescribed cluster weights
  std::optional<std::vector<Point>> sites;
  std::optional<NormFamily> norms;
  double epsilon = 0.5;

  std::size_t dim() const { return rho.dim(); }
  bool isotropic() const { return !norms.has_value(); }
  std::vector<double> kappa_values() const;

  /// Throws std::invalid_argument on any violated invariant: Σκ = 1, each
  /// κ_i > 0 and a multiple of ν(ρ), sites/matrices of matching shape,
  /// ε in (0, 1/2].
  void validate() const;
};

/// Sparse fractional assignment ξ_ij, stored column-wise: for each point j
/// the clusters it is (partially) assigned to, in ascending cluster order.
/// Only strictly positive fractions are stored.
class Clustering {
 public:
  struct Entry {
    std::uint32_t cluster = 0;
    double fraction = 0.0;
  };
  struct Triplet {
    std::uint32_t cluster = 0;
    std::uint64_t point = 0;
    double fraction = 0.0;
  };

  static constexpr double kColumnTolerance = 1e-9;

  Clustering() = default;

  /// Builds from (i, j, ξ) triplets; duplicates are summed, zeros dropped.
  /// Throws std::invalid_argument if some column does not sum to one.
  static Clustering from_triplets(std::size_t k, std::uint64_t n, std::vector<Triplet> triplets);
  /// Integer clustering from one label per point.
  static Clustering from_labels(std::size_t k, std::span<const std::uint32_t> labels);
  /// Row-major k x n dense matrix.
  static Clustering from_dense(std::size_t k, std::uint64_t n, std::span<const double> xi);

  std::size_t clusters() const { return k_; }
  std::uint64_t points() const { return n_; }

  std::span<const Entry> column(std::uint64_t j) const {
    return {entries_.data() + offsets_[j], entries_.data() + offsets_[j + 1]};
  }
  double value(std::size_t i, std::uint64_t j) const;

  std::size_t nonzeros() const { return entries_.size(); }
  /// Number of stored fractions strictly below one.
  std::size_t fractional_count() const;
  bool is_integer() const { return fractional_count() == 0; }

  bool operator==(const Clustering& other) const;

 private:
  std::size_t k_ = 0;
  std::uint64_t n_ = 0;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<Entry> entries_;
};

/// w_i = ν(ρ) Σ_j ξ_ij
std::vector<double> cluster_weights(const Clustering& c, const Resolution& res);

struct ConstraintCheck {
  bool satisfied = false;
  double max_violation = 0.0;
};

inline constexpr double kWeightTolerance = 1e-10;

ConstraintCheck check_constraints(const Clustering& c, const Instance& instance);

/// Σ_i Σ_j ξ_ij ω_j ||x_j - s_i||^2, accumulated per cluster in point order and
/// then summed over clusters in index order.
double cost_sites(const Clustering& c, std::span<const Point> sites, const Resolution& res);
double cost_sites(const Clustering& c, std::span<const Point> sites, const Resolution& res, const NormFamily& norms);
double cost_sites(const Clustering& c, std::span<const Point> sites, const Resolution& res, const NormFamily* norms);

/// Per-cluster contributions of cost_sites.
std::vector<double> cluster_costs(const Clustering& c, std::span<const Point> sites, const Resolution& res,
                                  const NormFamily* norms = nullptr);

/// Weighted cluster centroids; throws std::domain_error on a zero-weight cluster.
std::vector<Point> centroids(const Clustering& c, const Resolution& res);

double cost_centroid(const Clustering& c, const Resolution& res, const NormFamily* norms = nullptr);

}  // namespace rescore
