#include "rescore/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "rescore/random.hpp"
#include "transport_simplex.hpp"

namespace rescore {
namespace {

using i128 = __int128;

constexpr int kMaxSiteBits = 30;
constexpr double kMaxSiteMagnitude = 1 << 20;

struct FlowScale {
  int exponent = 0;           // one flow unit carries mass 2^-exponent
  std::int64_t supply = 0;    // units per point
  std::vector<std::int64_t> demand;
};

FlowScale flow_scale(const TransportProblem& p) {
  FlowScale scale;
  scale.exponent = p.at.total_exponent();
  for (const Dyadic& kappa : p.demands) scale.exponent = std::max(scale.exponent, -kappa.exponent());
  if (scale.exponent > 62) throw std::invalid_argument("cluster weights are too finely divided");
  scale.supply = std::int64_t{1} << (scale.exponent - p.at.total_exponent());
  for (const Dyadic& kappa : p.demands) scale.demand.push_back(kappa.scaled_numerator(-scale.exponent));
  return scale;
}

// Smallest b <= kMaxSiteBits with value * 2^b integral.
std::optional<int> dyadic_bits(double value) {
  if (std::abs(value) > kMaxSiteMagnitude) return std::nullopt;
  for (int b = 0; b <= kMaxSiteBits; ++b) {
    const double scaled = std::ldexp(value, b);
    if (scaled == std::floor(scaled)) return b;
  }
  return std::nullopt;
}

struct ExactCosts {
  int bits = 0;                        // costs are in units of 2^-2*bits
  std::vector<std::int64_t> points;    // n x d integer coordinates
  std::vector<std::int64_t> sites;     // k x d
  std::int64_t max_cost = 0;
};

// Integer cost data when every coordinate is dyadic with few enough bits
// for all simplex potentials to stay inside int64.
std::optional<ExactCosts> exact_costs(const TransportProblem& p) {
  if (p.norms != nullptr) return std::nullopt;
  const std::size_t d = p.at.dim();
  int bits = 0;
  for (std::size_t t = 0; t < d; ++t) bits = std::max(bits, p.at.exponent(t) + 1);
  for (const Point& s : p.sites) {
    for (double v : s) {
      const auto b = dyadic_bits(v);
      if (!b) return std::nullopt;
      bits = std::max(bits, *b);
    }
  }
  if (bits > kMaxSiteBits) return std::nullopt;

  ExactCosts ec;
  ec.bits = bits;
  for (const Point& s : p.sites) {
    for (double v : s) ec.sites.push_back(static_cast<std::int64_t>(std::ldexp(v, bits)));
  }
  // Largest squared distance between any site and any point of [0,1]^d.
  i128 max_cost = 0;
  const std::int64_t one = std::int64_t{1} << bits;
  for (std::size_t i = 0; i < p.sites.size(); ++i) {
    i128 c = 0;
    for (std::size_t t = 0; t < d; ++t) {
      const std::int64_t s = ec.sites[i * d + t];
      const i128 reach = std::max<std::int64_t>(std::abs(s), std::abs(one - s));
      c += reach * reach;
    }
    max_cost = std::max(max_cost, c);
  }
  const i128 nodes = static_cast<i128>(p.at.size()) + static_cast<i128>(p.sites.size()) + 2;
  const i128 k = static_cast<i128>(p.sites.size());
  if (5 * nodes * (max_cost + 1) >= (i128{1} << 62)) return std::nullopt;
  // scaled duals reach 2 k² max_cost in magnitude
  if (4 * k * k * (max_cost + 1) >= (i128{1} << 62)) return std::nullopt;
  ec.max_cost = static_cast<std::int64_t>(max_cost);

  const std::uint64_t n = p.at.size();
  ec.points.resize(n * d);
  MultiIndex multi(d, 0);
  for (std::uint64_t j = 0; j < n; ++j) {
    for (std::size_t t = 0; t < d; ++t) {
      ec.points[j * d + t] = static_cast<std::int64_t>(2 * multi[t] + 1) << (bits - p.at.exponent(t) - 1);
    }
    for (std::size_t t = d; t-- > 0;) {
      if (++multi[t] < p.at.axis_count(t)) break;
      multi[t] = 0;
    }
  }
  return ec;
}

// Cluster potentials μ satisfying μ_l - μ_i <= c(l,j) - c(i,j) for every
// support arc (i,j).  With W the shortest-path closure of the k-node graph
// carrying the tightest such differences, every row W(r,.) is feasible; their
// sum, divided by k, is strictly slack on each constraint that does not close
// a zero-weight cycle, so generic support points end up inside their cells.
// Returns k·μ normalized to μ_0 = 0, which stays integral for integer costs.
template <typename Cost, typename CostFn>
std::vector<Cost> scaled_cluster_duals(std::size_t k,
                                       const std::vector<typename detail::TransportSimplex<Cost, CostFn>::Arc>& support,
                                       const CostFn& cost) {
  const Cost inf = std::numeric_limits<Cost>::max();
  std::vector<Cost> w(k * k, inf);
  for (std::size_t i = 0; i < k; ++i) w[i * k + i] = Cost(0);
  for (const auto& arc : support) {
    const Cost own = cost(arc.cluster, arc.point);
    for (std::size_t l = 0; l < k; ++l) {
      if (l == arc.cluster) continue;
      Cost& x = w[arc.cluster * k + l];
      x = std::min(x, cost(l, arc.point) - own);
    }
  }
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t i = 0; i < k; ++i) {
      if (w[i * k + m] == inf) continue;
      for (std::size_t l = 0; l < k; ++l) {
        if (w[m * k + l] == inf) continue;
        w[i * k + l] = std::min(w[i * k + l], w[i * k + m] + w[m * k + l]);
      }
    }
  }
  std::vector<Cost> mu(k, Cost(0));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t l = 0; l < k; ++l) {
      if (w[r * k + l] == inf) throw std::logic_error("support graph is not strongly connected");
      mu[l] += w[r * k + l];
    }
  }
  const Cost base = mu[0];
  for (Cost& m : mu) m -= base;
  return mu;
}

Clustering clustering_from_support(std::size_t k, std::uint64_t n, std::int64_t supply, int supply_shift,
                                   const auto& support) {
  std::vector<Clustering::Triplet> triplets;
  triplets.reserve(support.size());
  for (const auto& arc : support) {
    const double fraction = arc.flow == supply ? 1.0 : std::ldexp(static_cast<double>(arc.flow), -supply_shift);
    triplets.push_back({arc.cluster, arc.point, fraction});
  }
  return Clustering::from_triplets(k, n, std::move(triplets));
}

SolveResult solve_exact(const TransportProblem& p, const FlowScale& scale, const ExactCosts& ec) {
  const std::size_t d = p.at.dim();
  const std::size_t k = p.sites.size();
  const std::uint64_t n = p.at.size();
  const std::int64_t* pts = ec.points.data();
  const std::int64_t* sts = ec.sites.data();
  auto cost = [pts, sts, d](std::size_t i, std::uint64_t j) {
    std::int64_t sum = 0;
    for (std::size_t t = 0; t < d; ++t) {
      const std::int64_t diff = pts[j * d + t] - sts[i * d + t];
      sum += diff * diff;
    }
    return sum;
  };
  using Simplex = detail::TransportSimplex<std::int64_t, decltype(cost)>;
  Simplex simplex(n, k, scale.supply, scale.demand, cost, ec.max_cost, 0);
  simplex.run();
  const auto support = simplex.support();

  const int supply_shift = scale.exponent - p.at.total_exponent();
  const int cost_shift = 2 * ec.bits;
  SolveResult result;
  result.exact = true;
  result.pivots = simplex.pivots();
  result.clustering = clustering_from_support(k, n, scale.supply, supply_shift, support);

  i128 primal = 0;
  for (const auto& arc : support) primal += static_cast<i128>(arc.flow) * cost(arc.cluster, arc.point);
  result.objective = std::ldexp(static_cast<double>(primal), -(scale.exponent + cost_shift));

  // Everything below is scaled by k so that k·μ stays integral.
  const auto kk = static_cast<std::int64_t>(k);
  const std::vector<std::int64_t> kmu = scaled_cluster_duals<std::int64_t>(k, support, cost);
  i128 dual = 0;
  for (std::uint64_t j = 0; j < n; ++j) {
    std::int64_t u = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < k; ++i) u = std::min(u, kk * cost(i, j) - kmu[i]);
    dual += static_cast<i128>(scale.supply) * u;
  }
  for (std::size_t i = 0; i < k; ++i) dual += static_cast<i128>(scale.demand[i]) * kmu[i];
  result.dual_objective =
      dual == primal * kk ? result.objective
                          : std::ldexp(static_cast<double>(dual) / static_cast<double>(kk), -(scale.exponent + cost_shift));
  for (std::int64_t m : kmu) {
    result.duals.push_back(std::ldexp(static_cast<double>(m) / static_cast<double>(kk), -cost_shift));
  }
  result.fractional_count = result.clustering.fractional_count();
  return result;
}

SolveResult solve_floating(const TransportProblem& p, const FlowScale& scale) {
  const std::size_t d = p.at.dim();
  const std::size_t k = p.sites.size();
  const std::uint64_t n = p.at.size();
  const std::vector<double> coords = grid_coordinates(p.at);
  std::vector<double> sites;
  for (const Point& s : p.sites) sites.insert(sites.end(), s.begin(), s.end());
  std::vector<double> mats;
  if (p.norms) {
    for (std::size_t i = 0; i < k; ++i) {
      const auto& a = p.norms->matrix(i);
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) mats.push_back(a(r, c));
      }
    }
  }
  const double* pts = coords.data();
  const double* sts = sites.data();
  const double* ms = mats.empty() ? nullptr : mats.data();
  auto cost = [pts, sts, ms, d](std::size_t i, std::uint64_t j) {
    const double* x = pts + j * d;
    const double* s = sts + i * d;
    if (ms == nullptr) {
      double sum = 0.0;
      for (std::size_t t = 0; t < d; ++t) sum += (x[t] - s[t]) * (x[t] - s[t]);
      return sum;
    }
    const double* a = ms + i * d * d;
    double sum = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < d; ++c) row += a[r * d + c] * (x[c] - s[c]);
      sum += (x[r] - s[r]) * row;
    }
    return sum;
  };

  double max_cost = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::uint64_t j = 0; j < n; ++j) max_cost = std::max(max_cost, cost(i, j));
  }
  const double big_m = static_cast<double>(n + k + 1) * (max_cost + 1.0);
  const double tolerance = 64 * std::numeric_limits<double>::epsilon() * big_m;

  using Simplex = detail::TransportSimplex<double, decltype(cost)>;
  Simplex simplex(n, k, scale.supply, scale.demand, cost, max_cost, tolerance);
  simplex.run();
  const auto support = simplex.support();

  const int supply_shift = scale.exponent - p.at.total_exponent();
  SolveResult result;
  result.exact = false;
  result.pivots = simplex.pivots();
  result.clustering = clustering_from_support(k, n, scale.supply, supply_shift, support);
  result.objective = cost_sites(result.clustering, p.sites, p.at, p.norms);

  result.duals = scaled_cluster_duals<double>(k, support, cost);
  for (double& m : result.duals) m /= static_cast<double>(k);
  const double nu = voxel_volume(p.at).to_double();
  double dual = 0.0;
  for (std::uint64_t j = 0; j < n; ++j) {
    double u = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) u = std::min(u, cost(i, j) - result.duals[i]);
    dual += nu * u;
  }
  for (std::size_t i = 0; i < k; ++i) dual += p.demands[i].to_double() * result.duals[i];
  result.dual_objective = dual;
  result.fractional_count = result.clustering.fractional_count();
  return result;
}

void validate_problem(const TransportProblem& p) {
  const std::size_t k = p.demands.size();
  if (k == 0) throw std::invalid_argument("no clusters");
  if (p.sites.size() != k) throw std::invalid_argument("need exactly one site per cluster");
  Dyadic total;
  for (const Dyadic& kappa : p.demands) {
    if (kappa <= Dyadic()) throw std::invalid_argument("cluster weights must be positive");
    total = total + kappa;
  }
  if (total != Dyadic::pow2(0)) throw std::invalid_argument("infeasible weights: cluster weights must sum to one");
  for (const Point& s : p.sites) {
    if (s.size() != p.at.dim()) throw std::invalid_argument("site dimension mismatch");
    for (double v : s) {
      if (!std::isfinite(v)) throw std::invalid_argument("site coordinates must be finite");
    }
  }
  if (p.norms && (p.norms->size() != k || p.norms->dim() != p.at.dim())) {
    throw std::invalid_argument("norm family does not match the problem");
  }
}

}  // namespace

TransportProblem make_transport_problem(const Instance& instance, const Resolution& at, const std::vector<Point>& sites) {
  instance.validate();
  if (at.dim() != instance.dim()) throw std::invalid_argument("resolution dimension mismatch");
  TransportProblem p;
  p.at = at;
  p.demands = instance.kappa;
  p.sites = sites;
  p.norms = instance.norms ? &*instance.norms : nullptr;
  return p;
}

SolveResult solve(const TransportProblem& problem, const SolveOptions& options) {
  validate_problem(problem);
  const std::uint64_t n = problem.at.size();
  const std::size_t k = problem.sites.size();
  if (n > options.max_arcs / k) {
    throw std::length_error("dense transportation problem has " + std::to_string(n) + " x " + std::to_string(k) +
                            " arcs, above the limit of " + std::to_string(options.max_arcs) +
                            "; coarsen the instance first");
  }
  const FlowScale scale = flow_scale(problem);
  if (options.arithmetic != Arithmetic::kFloating) {
    if (auto ec = exact_costs(problem)) return solve_exact(problem, scale, *ec);
    if (options.arithmetic == Arithmetic::kExact) {
      throw std::invalid_argument("exact arithmetic needs isotropic costs and dyadic sites");
    }
  }
  return solve_floating(problem, scale);
}

SolveResult solve_assignment(const Instance& instance, const Resolution& at, const std::vector<Point>& sites,
                             const SolveOptions& options) {
  return solve(make_transport_problem(instance, at, sites), options);
}

SolveResult solve_assignment(const Instance& instance, const Resolution& at, const SolveOptions& options) {
  if (!instance.sites) throw std::invalid_argument("instance has no sites");
  return solve_assignment(instance, at, *instance.sites, options);
}

AlternateResult alternate_minimize(const Instance& instance, int max_rounds, std::vector<Point> sites) {
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be positive");
  AlternateResult out;
  while (true) {
    SolveResult result = solve_assignment(instance, instance.rho, sites);
    ++out.rounds;
    const bool stalled =
        !out.objectives.empty() && out.objectives.back() - result.objective <= 1e-9 * out.objectives.back();
    out.objectives.push_back(result.objective);
    out.sites = sites;
    out.result = std::move(result);
    if (stalled || out.rounds >= max_rounds) break;
    // κ_i > 0 forces every cluster to keep positive weight.
    std::vector<Point> next = centroids(out.result.clustering, instance.rho);
    if (next == sites) break;
    sites = std::move(next);
  }
  return out;
}

AlternateResult alternate_minimize(const Instance& instance, int max_rounds, std::uint64_t seed) {
  auto engine = SeedStream(seed).derive("sites").engine();
  std::vector<Point> sites(instance.k, Point(instance.dim()));
  for (auto& s : sites) {
    for (double& v : s) v = uniform01(engine);
  }
  return alternate_minimize(instance, max_rounds, std::move(sites));
}

}  // namespace rescore
