#include "rescore/grid.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rescore {

Resolution::Resolution(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  if (exponents_.empty()) throw std::invalid_argument("resolution needs at least one axis");
  for (int e : exponents_) {
    if (e < 0) throw std::invalid_argument("resolution exponents must be nonnegative");
    total_ += e;
  }
  if (total_ > kMaxTotalExponent) {
    throw std::invalid_argument("resolution exceeds 2^" + std::to_string(kMaxTotalExponent) + " points");
  }
}

bool Resolution::coarser_or_equal(const Resolution& other) const {
  if (dim() != other.dim()) return false;
  for (std::size_t t = 0; t < dim(); ++t) {
    if (exponents_[t] > other.exponents_[t]) return false;
  }
  return true;
}

std::string Resolution::to_string() const {
  std::ostringstream out;
  out << '(';
  for (std::size_t t = 0; t < exponents_.size(); ++t) {
    if (t) out << ',';
    out << exponents_[t];
  }
  out << ')';
  return out.str();
}

namespace {

void require_nested(const Resolution& fine, const Resolution& coarse) {
  if (!coarse.coarser_or_equal(fine)) {
    throw std::invalid_argument("coarse resolution " + coarse.to_string() + " is not <= " + fine.to_string());
  }
}

void require_multi(const Resolution& res, std::span<const std::uint64_t> multi) {
  if (multi.size() != res.dim()) throw std::out_of_range("grid index has wrong dimension");
  for (std::size_t t = 0; t < multi.size(); ++t) {
    if (multi[t] >= res.axis_count(t)) throw std::out_of_range("grid index out of range");
  }
}

}  // namespace

std::uint64_t to_linear(const Resolution& res, std::span<const std::uint64_t> multi) {
  require_multi(res, multi);
  std::uint64_t linear = 0;
  for (std::size_t t = 0; t < multi.size(); ++t) {
    linear = (linear << res.exponent(t)) | multi[t];
  }
  return linear;
}

MultiIndex to_multi(const Resolution& res, std::uint64_t linear) {
  if (linear >= res.size()) throw std::out_of_range("linear index out of range");
  MultiIndex multi(res.dim());
  for (std::size_t t = res.dim(); t-- > 0;) {
    multi[t] = linear & (res.axis_count(t) - 1);
    linear >>= res.exponent(t);
  }
  return multi;
}

Dyadic voxel_volume(const Resolution& res) { return Dyadic::pow2(-res.total_exponent()); }

Dyadic axis_coord(int exponent, std::uint64_t index) {
  return Dyadic(static_cast<std::int64_t>(2 * index + 1), -(exponent + 1));
}

Point point_coords(const Resolution& res, std::span<const std::uint64_t> multi) {
  require_multi(res, multi);
  Point x(res.dim());
  for (std::size_t t = 0; t < res.dim(); ++t) {
    x[t] = std::ldexp(static_cast<double>(2 * multi[t] + 1), -(res.exponent(t) + 1));
  }
  return x;
}

Point point_coords(const Resolution& res, std::uint64_t linear) { return point_coords(res, to_multi(res, linear)); }

std::vector<double> grid_coordinates(const Resolution& res) {
  const std::size_t d = res.dim();
  const std::uint64_t n = res.size();
  std::vector<double> coords(n * d);
  MultiIndex multi(d, 0);
  for (std::uint64_t j = 0; j < n; ++j) {
    for (std::size_t t = 0; t < d; ++t) {
      coords[j * d + t] = std::ldexp(static_cast<double>(2 * multi[t] + 1), -(res.exponent(t) + 1));
    }
    // odometer increment, last axis fastest
    for (std::size_t t = d; t-- > 0;) {
      if (++multi[t] < res.axis_count(t)) break;
      multi[t] = 0;
    }
  }
  return coords;
}

MultiIndex merge_index(const Resolution& fine, const Resolution& coarse, std::span<const std::uint64_t> j) {
  require_nested(fine, coarse);
  require_multi(fine, j);
  MultiIndex q(j.size());
  for (std::size_t t = 0; t < j.size(); ++t) q[t] = j[t] >> (fine.exponent(t) - coarse.exponent(t));
  return q;
}

std::uint64_t merge_linear(const Resolution& fine, const Resolution& coarse, std::uint64_t j) {
  return to_linear(coarse, merge_index(fine, coarse, to_multi(fine, j)));
}

std::vector<std::uint64_t> merge_map(const Resolution& fine, const Resolution& coarse) {
  require_nested(fine, coarse);
  const std::size_t d = fine.dim();
  const std::uint64_t n = fine.size();
  std::vector<std::uint64_t> map(n);
  MultiIndex multi(d, 0);
  for (std::uint64_t j = 0; j < n; ++j) {
    std::uint64_t q = 0;
    for (std::size_t t = 0; t < d; ++t) {
      q = (q << coarse.exponent(t)) | (multi[t] >> (fine.exponent(t) - coarse.exponent(t)));
    }
    map[j] = q;
    for (std::size_t t = d; t-- > 0;) {
      if (++multi[t] < fine.axis_count(t)) break;
      multi[t] = 0;
    }
  }
  return map;
}

Batch batch_of(const Resolution& fine, const Resolution& coarse, std::uint64_t q) {
  require_nested(fine, coarse);
  const MultiIndex qm = to_multi(coarse, q);
  const std::size_t d = fine.dim();

  std::vector<std::uint64_t> lo(d), span_len(d);
  std::uint64_t count = 1;
  for (std::size_t t = 0; t < d; ++t) {
    const int shift = fine.exponent(t) - coarse.exponent(t);
    lo[t] = qm[t] << shift;
    span_len[t] = std::uint64_t{1} << shift;
    count *= span_len[t];
  }

  Batch batch{q, {}};
  batch.members.reserve(count);
  MultiIndex j = lo;
  for (std::uint64_t m = 0; m < count; ++m) {
    batch.members.push_back(to_linear(fine, j));
    for (std::size_t t = d; t-- > 0;) {
      if (++j[t] < lo[t] + span_len[t]) break;
      j[t] = lo[t];
    }
  }
  return batch;
}

Point batch_centroid(const Resolution& fine, const Resolution& coarse, std::uint64_t q) {
  const Batch batch = batch_of(fine, coarse, q);
  const std::size_t d = fine.dim();
  // Sum odd numerators (2 j_t + 1) per axis; the mean over the batch is
  // exact because the batch size is a power of two.
  std::vector<std::uint64_t> sums(d, 0);
  for (std::uint64_t j : batch.members) {
    const MultiIndex multi = to_multi(fine, j);
    for (std::size_t t = 0; t < d; ++t) sums[t] += 2 * multi[t] + 1;
  }
  const int log_count = fine.total_exponent() - coarse.total_exponent();
  Point c(d);
  for (std::size_t t = 0; t < d; ++t) {
    c[t] = std::ldexp(static_cast<double>(sums[t]), -(fine.exponent(t) + 1) - log_count);
  }
  return c;
}

double batch_error(const Resolution& fine, const Resolution& coarse) {
  require_nested(fine, coarse);
  double axis_sum = 0.0;
  for (std::size_t t = 0; t < fine.dim(); ++t) {
    axis_sum += std::ldexp(1.0, -2 * coarse.exponent(t)) - std::ldexp(1.0, -2 * fine.exponent(t));
  }
  return voxel_volume(coarse).to_double() * axis_sum / 12.0;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double diff = a[t] - b[t];
    sum += diff * diff;
  }
  return sum;
}

Scatter scatter(std::span<const WeightedPoint> points) {
  if (points.empty()) throw std::invalid_argument("scatter of an empty point set");
  const std::size_t d = points.front().x.size();
  Scatter result;
  result.centroid.assign(d, 0.0);
  for (const auto& p : points) {
    if (p.x.size() != d) throw std::invalid_argument("dimension mismatch");
    result.total_weight += p.weight;
    for (std::size_t t = 0; t < d; ++t) result.centroid[t] += p.weight * p.x[t];
  }
  if (!(result.total_weight > 0.0)) throw std::invalid_argument("scatter needs positive total weight");
  for (double& c : result.centroid) c /= result.total_weight;
  for (const auto& p : points) result.value += p.weight * squared_distance(p.x, result.centroid);
  return result;
}

std::vector<WeightedPoint> batch_points(const Resolution& fine, const Resolution& coarse, std::uint64_t q) {
  const Batch batch = batch_of(fine, coarse, q);
  const double weight = voxel_volume(fine).to_double();
  std::vector<WeightedPoint> points;
  points.reserve(batch.members.size());
  for (std::uint64_t j : batch.members) points.push_back({point_coords(fine, j), weight});
  return points;
}

HuygensReport huygens_cost(std::span<const WeightedPoint> points, std::span<const double> site) {
  const Scatter s = scatter(points);
  HuygensReport report;
  for (const auto& p : points) report.cost += p.weight * squared_distance(p.x, site);
  report.scatter = s.value;
  report.shift = s.total_weight * squared_distance(s.centroid, site);
  report.residual = std::abs(report.cost - report.scatter - report.shift);
  if (report.residual > 1e-12 * report.cost + 1e-300) {
    throw std::logic_error("centroid decomposition violated");
  }
  return report;
}

}  // namespace rescore
