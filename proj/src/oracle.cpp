#include "rescore/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rescore::oracle {
namespace {

constexpr int kMaxDpExponent = 16;
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// α(α²-1): scatter of α consecutive grid points in units of 1/(3·2^(3ρ+2)).
std::int64_t interval_cost(std::int64_t alpha) { return alpha * (alpha * alpha - 1); }

struct Layer {
  const std::vector<std::int64_t>* prev;  // F_{c-1}
  std::vector<std::int64_t>* cur;         // F_c
  std::vector<std::uint32_t>* split;      // largest optimal remainder s for each m
};

// F_c(m) = min_s F_{c-1}(s) + f(m - s) over s in [s_lo, s_hi], keeping the
// largest minimizing s (the shortest last interval).
void fill(const Layer& layer, std::int64_t m_lo, std::int64_t m_hi, std::int64_t s_lo, std::int64_t s_hi) {
  if (m_lo > m_hi) return;
  const std::int64_t m = (m_lo + m_hi) / 2;
  std::int64_t best = kInf;
  std::int64_t best_s = s_lo;
  const std::int64_t upper = std::min(s_hi, m - 1);
  for (std::int64_t s = s_lo; s <= upper; ++s) {
    const std::int64_t prev = (*layer.prev)[s];
    if (prev >= kInf) continue;
    const std::int64_t value = prev + interval_cost(m - s);
    if (value <= best) {
      best = value;
      best_s = s;
    }
  }
  (*layer.cur)[m] = best;
  (*layer.split)[m] = static_cast<std::uint32_t>(best_s);
  fill(layer, m_lo, m - 1, s_lo, best_s);
  fill(layer, m + 1, m_hi, best_s, s_hi);
}

}  // namespace

Opt1DResult opt1d_dp(int rho, std::uint64_t k) {
  if (rho < 0 || rho > kMaxDpExponent) throw std::invalid_argument("opt1d_dp supports 0 <= rho <= 16");
  const std::int64_t n = std::int64_t{1} << rho;
  if (k < 1 || k > static_cast<std::uint64_t>(n)) throw std::invalid_argument("need 1 <= k <= 2^rho");
  if (k * static_cast<std::uint64_t>(n + 1) > (std::uint64_t{1} << 28)) throw std::invalid_argument("opt1d_dp table too large");

  std::vector<std::int64_t> prev(n + 1, kInf), cur(n + 1, kInf);
  prev[0] = 0;
  std::vector<std::vector<std::uint32_t>> splits(k, std::vector<std::uint32_t>(n + 1, 0));
  for (std::uint64_t c = 1; c <= k; ++c) {
    std::fill(cur.begin(), cur.end(), kInf);
    const auto cc = static_cast<std::int64_t>(c);
    fill({&prev, &cur, &splits[c - 1]}, cc, n, cc - 1, n - 1);
    std::swap(prev, cur);
  }

  Opt1DResult result;
  result.cost = std::ldexp(static_cast<double>(prev[n]), -(3 * rho + 2)) / 3.0;
  // Reconstruct right to left; splits[c-1][m] is the start of the last
  // cluster among the first m points.
  std::vector<std::uint64_t> sizes(k);
  std::int64_t m = n;
  for (std::uint64_t c = k; c >= 1; --c) {
    const std::int64_t s = splits[c - 1][m];
    sizes[c - 1] = static_cast<std::uint64_t>(m - s);
    m = s;
  }
  // The DP settles the shortest last interval first.  Cost depends only on
  // the interval lengths, so the mirrored partition is optimal as well and
  // has the shortest first interval.
  std::reverse(sizes.begin(), sizes.end());
  std::uint64_t start = 0;
  for (std::uint64_t alpha : sizes) {
    result.sizes.push_back(alpha);
    result.boundaries.push_back(start + alpha);
    result.centroids.push_back(std::ldexp(static_cast<double>(2 * start + alpha), -(rho + 1)));
    start += alpha;
  }
  return result;
}

double opt1d_closed(int rho, int gamma) {
  if (gamma < 0 || rho < 0) throw std::invalid_argument("rho and gamma must be nonnegative");
  if (gamma > rho) throw std::invalid_argument("gamma must not exceed rho");
  return (std::ldexp(1.0, 2 * (rho - gamma)) - 1.0) * std::ldexp(1.0, -2 * (rho + 1)) / 3.0;
}

double lower_bound_1d(int rho, std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  const double kk = static_cast<double>(k);
  const double value = (std::ldexp(1.0, 2 * (rho - 1)) / (kk * kk) - 1.0) * std::ldexp(1.0, -2 * (rho + 1)) / 3.0;
  return std::max(0.0, value);
}

BruteForceResult brute_force_constrained(const Instance& instance, const std::vector<Point>& sites) {
  instance.validate();
  const std::uint64_t n = instance.rho.size();
  const auto k = static_cast<std::size_t>(instance.k);
  if (n > kBruteForceMaxPoints || instance.k > kBruteForceMaxClusters) {
    throw std::invalid_argument("brute force supports at most 8 points and 3 clusters");
  }
  if (sites.size() != k) throw std::invalid_argument("need one site per cluster");

  const Dyadic unit = voxel_volume(instance.rho);
  const double nu = unit.to_double();
  std::vector<std::int64_t> target(k);
  for (std::size_t i = 0; i < k; ++i) target[i] = instance.kappa[i].multiples_of(unit);

  const NormFamily* norms = instance.norms ? &*instance.norms : nullptr;
  std::vector<double> cost(k * n);
  for (std::uint64_t j = 0; j < n; ++j) {
    const Point x = point_coords(instance.rho, j);
    for (std::size_t i = 0; i < k; ++i) {
      cost[i * n + j] = nu * (norms ? norms->squared_norm(i, x, sites[i]) : squared_distance(x, sites[i]));
    }
  }

  BruteForceResult best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> labels(n, 0);
  std::uint64_t combos = 1;
  for (std::uint64_t j = 0; j < n; ++j) combos *= k;
  for (std::uint64_t code = 0; code < combos; ++code) {
    std::uint64_t rest = code;
    std::vector<std::int64_t> counts(k, 0);
    for (std::uint64_t j = n; j-- > 0;) {
      labels[j] = static_cast<std::uint32_t>(rest % k);
      rest /= k;
      ++counts[labels[j]];
    }
    if (counts != target) continue;
    double total = 0.0;
    for (std::uint64_t j = 0; j < n; ++j) total += cost[labels[j] * n + j];
    if (total < best.cost) {
      best.cost = total;
      best.labels = labels;
    }
  }
  return best;
}

}  // namespace rescore::oracle
