#include "rescore/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rescore {

// ---------------------------------------------------------------- NormFamily

NormFamily::NormFamily(std::vector<Eigen::MatrixXd> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw std::invalid_argument("norm family is empty");
  const Eigen::Index d = matrices_.front().rows();
  bool first = true;
  for (const auto& a : matrices_) {
    if (a.rows() != d || a.cols() != d || d == 0) throw std::invalid_argument("norm matrices must be square and equal-sized");
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("norm matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::invalid_argument("eigen-decomposition failed");
    const double lo = solver.eigenvalues().minCoeff();
    const double hi = solver.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) throw std::invalid_argument("norm matrix is not positive definite");
    lambda_min_ = first ? lo : std::min(lambda_min_, lo);
    lambda_max_ = first ? hi : std::max(lambda_max_, hi);
    first = false;
  }
}

NormFamily NormFamily::identity(std::size_t k, std::size_t d) {
  return NormFamily(std::vector<Eigen::MatrixXd>(k, Eigen::MatrixXd::Identity(d, d)));
}

double NormFamily::squared_norm(std::size_t i, std::span<const double> x, std::span<const double> s) const {
  const Eigen::MatrixXd& a = matrices_[i];
  const std::size_t d = x.size();
  double sum = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    const double dr = x[r] - s[r];
    double row = 0.0;
    for (std::size_t c = 0; c < d; ++c) row += a(r, c) * (x[c] - s[c]);
    sum += dr * row;
  }
  return sum;
}

EigenBounds eigen_bounds(const NormFamily& family) {
  if (family.size() == 0) throw std::invalid_argument("empty norm family");
  return {family.lambda_min(), family.lambda_max()};
}

// ------------------------------------------------------------------ Instance

std::vector<double> Instance::kappa_values() const {
  std::vector<double> values;
  values.reserve(kappa.size());
  for (const auto& w : kappa) values.push_back(w.to_double());
  return values;
}

void Instance::validate() const {
  if (rho.dim() == 0) throw std::invalid_argument("instance has no resolution");
  if (k < 1) throw std::invalid_argument("cluster count must be positive");
  if (kappa.size() != static_cast<std::size_t>(k)) throw std::invalid_argument("kappa must have k entries");
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2]");

  const Dyadic unit = voxel_volume(rho);
  Dyadic total;
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    if (kappa[i] <= Dyadic()) throw std::invalid_argument("kappa_" + std::to_string(i) + " must be positive");
    if (!kappa[i].is_multiple_of(unit)) {
      throw std::invalid_argument("kappa_" + std::to_string(i) + " is not a multiple of the voxel volume");
    }
    total = total + kappa[i];
  }
  if (total != Dyadic::pow2(0)) throw std::invalid_argument("cluster weights must sum to one");

  if (sites) {
    if (sites->size() != static_cast<std::size_t>(k)) throw std::invalid_argument("need exactly k sites");
    for (const auto& s : *sites) {
      if (s.size() != dim()) throw std::invalid_argument("site dimension mismatch");
      for (double v : s) {
        if (!std::isfinite(v)) throw std::invalid_argument("site coordinates must be finite");
      }
    }
  }
  if (norms) {
    if (norms->size() != static_cast<std::size_t>(k) || norms->dim() != dim()) {
      throw std::invalid_argument("need k norm matrices of size d x d");
    }
  }
}

// ---------------------------------------------------------------- Clustering

Clustering Clustering::from_triplets(std::size_t k, std::uint64_t n, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.point != b.point ? a.point < b.point : a.cluster < b.cluster;
  });
  Clustering c;
  c.k_ = k;
  c.n_ = n;
  c.offsets_.assign(n + 1, 0);
  c.entries_.reserve(triplets.size());

  std::size_t pos = 0;
  for (std::uint64_t j = 0; j < n; ++j) {
    double column_sum = 0.0;
    while (pos < triplets.size() && triplets[pos].point == j) {
      const Triplet& t = triplets[pos++];
      if (t.cluster >= k) throw std::invalid_argument("cluster index out of range");
      if (t.fraction < 0.0 || !std::isfinite(t.fraction)) throw std::invalid_argument("fractions must be nonnegative");
      if (t.fraction == 0.0) continue;
      if (!c.entries_.empty() && c.offsets_[j] < c.entries_.size() && c.entries_.back().cluster == t.cluster) {
        c.entries_.back().fraction += t.fraction;
      } else {
        c.entries_.push_back({t.cluster, t.fraction});
      }
      column_sum += t.fraction;
    }
    if (std::abs(column_sum - 1.0) > kColumnTolerance) {
      throw std::invalid_argument("column " + std::to_string(j) + " sums to " + std::to_string(column_sum));
    }
    c.offsets_[j + 1] = c.entries_.size();
  }
  if (pos != triplets.size()) throw std::invalid_argument("point index out of range");
  return c;
}

Clustering Clustering::from_labels(std::size_t k, std::span<const std::uint32_t> labels) {
  std::vector<Triplet> triplets;
  triplets.reserve(labels.size());
  for (std::uint64_t j = 0; j < labels.size(); ++j) triplets.push_back({labels[j], j, 1.0});
  return from_triplets(k, labels.size(), std::move(triplets));
}

Clustering Clustering::from_dense(std::size_t k, std::uint64_t n, std::span<const double> xi) {
  if (xi.size() != k * n) throw std::invalid_argument("dense clustering has wrong size");
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::uint64_t j = 0; j < n; ++j) {
      if (xi[i * n + j] != 0.0) triplets.push_back({static_cast<std::uint32_t>(i), j, xi[i * n + j]});
    }
  }
  return from_triplets(k, n, std::move(triplets));
}

double Clustering::value(std::size_t i, std::uint64_t j) const {
  for (const Entry& e : column(j)) {
    if (e.cluster == i) return e.fraction;
  }
  return 0.0;
}

std::size_t Clustering::fractional_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const Entry& e) { return e.fraction < 1.0; }));
}

bool Clustering::operator==(const Clustering& other) const {
  if (k_ != other.k_ || n_ != other.n_ || offsets_ != other.offsets_) return false;
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    if (entries_[e].cluster != other.entries_[e].cluster || entries_[e].fraction != other.entries_[e].fraction) {
      return false;
    }
  }
  return true;
}

// --------------------------------------------------------------- evaluation

std::vector<double> cluster_weights(const Clustering& c, const Resolution& res) {
  if (c.points() != res.size()) throw std::invalid_argument("clustering does not match resolution");
  std::vector<double> sums(c.clusters(), 0.0);
  for (std::uint64_t j = 0; j < c.points(); ++j) {
    for (const auto& e : c.column(j)) sums[e.cluster] += e.fraction;
  }
  const double nu = voxel_volume(res).to_double();
  for (double& w : sums) w *= nu;
  return sums;
}

ConstraintCheck check_constraints(const Clustering& c, const Instance& instance) {
  if (c.clusters() != static_cast<std::size_t>(instance.k)) throw std::invalid_argument("cluster count mismatch");
  const std::vector<double> w = cluster_weights(c, instance.rho);
  ConstraintCheck check;
  for (std::size_t i = 0; i < w.size(); ++i) {
    check.max_violation = std::max(check.max_violation, std::abs(w[i] - instance.kappa[i].to_double()));
  }
  check.satisfied = check.max_violation <= kWeightTolerance;
  return check;
}

std::vector<double> cluster_costs(const Clustering& c, std::span<const Point> sites, const Resolution& res,
                                  const NormFamily* norms) {
  if (c.points() != res.size()) throw std::invalid_argument("clustering does not match resolution");
  if (sites.size() != c.clusters()) throw std::invalid_argument("need one site per cluster");
  for (const auto& s : sites) {
    if (s.size() != res.dim()) throw std::invalid_argument("site dimension mismatch");
  }
  if (norms && norms->size() != c.clusters()) throw std::invalid_argument("need one norm matrix per cluster");

  const std::vector<double> coords = grid_coordinates(res);
  const std::size_t d = res.dim();
  std::vector<double> sums(c.clusters(), 0.0);
  for (std::uint64_t j = 0; j < c.points(); ++j) {
    const std::span<const double> x(coords.data() + j * d, d);
    for (const auto& e : c.column(j)) {
      const double dist = norms ? norms->squared_norm(e.cluster, x, sites[e.cluster]) : squared_distance(x, sites[e.cluster]);
      sums[e.cluster] += e.fraction * dist;
    }
  }
  const double nu = voxel_volume(res).to_double();
  for (double& s : sums) s *= nu;
  return sums;
}

double cost_sites(const Clustering& c, std::span<const Point> sites, const Resolution& res, const NormFamily* norms) {
  double total = 0.0;
  for (double part : cluster_costs(c, sites, res, norms)) total += part;
  return total;
}

double cost_sites(const Clustering& c, std::span<const Point> sites, const Resolution& res) {
  return cost_sites(c, sites, res, nullptr);
}

double cost_sites(const Clustering& c, std::span<const Point> sites, const Resolution& res, const NormFamily& norms) {
  return cost_sites(c, sites, res, &norms);
}

std::vector<Point> centroids(const Clustering& c, const Resolution& res) {
  if (c.points() != res.size()) throw std::invalid_argument("clustering does not match resolution");
  const std::size_t d = res.dim();
  const std::vector<double> coords = grid_coordinates(res);
  std::vector<Point> sums(c.clusters(), Point(d, 0.0));
  std::vector<double> mass(c.clusters(), 0.0);
  for (std::uint64_t j = 0; j < c.points(); ++j) {
    for (const auto& e : c.column(j)) {
      mass[e.cluster] += e.fraction;
      for (std::size_t t = 0; t < d; ++t) sums[e.cluster][t] += e.fraction * coords[j * d + t];
    }
  }
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (!(mass[i] > 0.0)) throw std::domain_error("cluster " + std::to_string(i) + " has zero weight");
    for (double& v : sums[i]) v /= mass[i];
  }
  return sums;
}

double cost_centroid(const Clustering& c, const Resolution& res, const NormFamily* norms) {
  const std::vector<Point> cs = centroids(c, res);
  return cost_sites(c, cs, res, norms);
}

}  // namespace rescore
