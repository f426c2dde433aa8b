#include "rescore/coreset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rescore/diagrams.hpp"

namespace rescore {
namespace {

double axis_delta(int fine, int coarse) {
  return (std::ldexp(1.0, -2 * coarse) - std::ldexp(1.0, -2 * fine)) / 12.0;
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2]");
}

double relative_gap(const SolveResult& r) { return std::abs(r.duality_gap()) / (1.0 + std::abs(r.objective)); }

}  // namespace

int tau_star(int k, double epsilon) {
  require_epsilon(epsilon);
  if (k < 2) throw std::invalid_argument("tau* needs k >= 2");
  const double exponent = 5.0 / 3.0 + std::log2(static_cast<double>(k)) - 2.0 / 3.0 * std::log2(epsilon);
  // Snap values that are integers up to rounding (e.g. k = 4, ε = 1/4).
  const double nearest = std::round(exponent);
  if (std::abs(exponent - nearest) < 1e-12) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(exponent));
}

Resolution target_resolution(int k, double epsilon, const Resolution& rho) {
  const int tau = tau_star(k, epsilon);
  std::vector<int> exponents;
  for (int e : rho.exponents()) exponents.push_back(std::min(e, tau));
  return Resolution(std::move(exponents));
}

double delta_offset(const Resolution& fine, const Resolution& coarse) {
  if (!coarse.coarser_or_equal(fine)) throw std::invalid_argument("coarse resolution must be <= fine resolution");
  double delta = 0.0;
  for (std::size_t t = 0; t < fine.dim(); ++t) delta += axis_delta(fine.exponent(t), coarse.exponent(t));
  return delta;
}

CoresetPlan make_plan(int k, double epsilon, const Resolution& rho, const std::optional<Resolution>& tau_override) {
  require_epsilon(epsilon);
  CoresetPlan plan;
  plan.fine = rho;
  plan.epsilon = epsilon;
  plan.k_star = k;
  if (tau_override) {
    if (!tau_override->coarser_or_equal(rho)) throw std::invalid_argument("tau override must be <= rho");
    plan.coarse = *tau_override;
  } else {
    plan.coarse = target_resolution(k, epsilon, rho);
    const int tau = tau_star(k, epsilon);
    plan.clamped = std::any_of(rho.exponents().begin(), rho.exponents().end(), [tau](int e) { return e < tau; });
  }
  plan.delta = delta_offset(plan.fine, plan.coarse);
  return plan;
}

CoresetPlan make_plan(const Instance& instance, const std::optional<Resolution>& tau_override) {
  if (tau_override) return make_plan(instance.k, instance.epsilon, instance.rho, tau_override);
  return make_plan(std::max(instance.k, 2), instance.epsilon, instance.rho, std::nullopt);
}

Clustering restrict_to_coarse(const Clustering& fine, const CoresetPlan& plan) {
  if (fine.points() != plan.fine.size()) throw std::invalid_argument("clustering does not live on the fine grid");
  const std::size_t k = fine.clusters();
  const std::uint64_t coarse_n = plan.coarse.size();
  const std::vector<std::uint64_t> p = merge_map(plan.fine, plan.coarse);
  std::vector<double> sums(coarse_n * k, 0.0);
  for (std::uint64_t j = 0; j < fine.points(); ++j) {
    for (const auto& e : fine.column(j)) sums[p[j] * k + e.cluster] += e.fraction;
  }
  const int log_batch = plan.fine.total_exponent() - plan.coarse.total_exponent();
  std::vector<Clustering::Triplet> triplets;
  for (std::uint64_t q = 0; q < coarse_n; ++q) {
    for (std::size_t i = 0; i < k; ++i) {
      const double s = sums[q * k + i];
      if (s > 0.0) triplets.push_back({static_cast<std::uint32_t>(i), q, std::ldexp(s, -log_batch)});
    }
  }
  return Clustering::from_triplets(k, coarse_n, std::move(triplets));
}

Clustering extend_to_fine(const Clustering& coarse, const CoresetPlan& plan) {
  if (coarse.points() != plan.coarse.size()) throw std::invalid_argument("clustering does not live on the coarse grid");
  const std::vector<std::uint64_t> p = merge_map(plan.fine, plan.coarse);
  std::vector<Clustering::Triplet> triplets;
  triplets.reserve(p.size());
  for (std::uint64_t j = 0; j < p.size(); ++j) {
    for (const auto& e : coarse.column(p[j])) triplets.push_back({e.cluster, j, e.fraction});
  }
  return Clustering::from_triplets(coarse.clusters(), plan.fine.size(), std::move(triplets));
}

PropertyAReport verify_property_a(const Clustering& coarse, const std::vector<Point>& sites, const Instance& instance,
                                  const CoresetPlan& plan) {
  if (!instance.isotropic()) {
    throw std::invalid_argument("the exact offset identity holds for isotropic instances only");
  }
  if (!(plan.fine == instance.rho)) throw std::invalid_argument("plan does not match the instance resolution");
  PropertyAReport report;
  report.fine_cost = cost_sites(extend_to_fine(coarse, plan), sites, plan.fine);
  report.coarse_cost = cost_sites(coarse, sites, plan.coarse);
  report.delta = plan.delta;
  report.residual = std::abs(report.fine_cost - report.coarse_cost - report.delta);
  report.holds = report.residual <= kIdentityTolerance * (1.0 + report.fine_cost);
  return report;
}

PropertyBReport verify_property_b(const std::vector<Point>& sites, const Instance& instance, const CoresetPlan& plan,
                                  const SolveOptions& options) {
  if (!instance.isotropic()) throw std::invalid_argument("property (b) is checked on isotropic instances");
  PropertyBReport report;
  report.full = solve_assignment(instance, plan.fine, sites, options);
  report.coarse = solve_assignment(instance, plan.coarse, sites, options);
  report.delta = plan.delta;
  report.margin = (1.0 + plan.epsilon) * report.full.objective - (report.coarse.objective + plan.delta);
  report.holds = report.margin >= -kMarginTolerance;
  return report;
}

double transfer_bound(double gamma, double epsilon, const NormFamily& norms) {
  if (gamma < 1.0) throw std::invalid_argument("gamma must be at least 1");
  const EigenBounds b = eigen_bounds(norms);
  return (1.0 + epsilon) * gamma * b.lambda_max / b.lambda_min;
}

double transfer_bound(double gamma, double epsilon) {
  if (gamma < 1.0) throw std::invalid_argument("gamma must be at least 1");
  return (1.0 + epsilon) * gamma;
}

namespace {

void fill_asymptotics(SizeReport& r, int k, double epsilon, std::size_t d) {
  const double kk = static_cast<double>(k);
  const double dd = static_cast<double>(d);
  r.axis_bound = std::pow(2.0, 8.0 / 3.0) * kk / std::pow(epsilon, 2.0 / 3.0);
  r.total_bound = std::pow(r.axis_bound, dd);
  r.axis_prose_bound = 7.0 * kk / std::pow(epsilon, 2.0 / 3.0);
  // Powers of 1/ε stay exact for decimal ε such as 10^-3.
  const double inv = 1.0 / epsilon;
  r.pencil_size = kk * kk * std::pow(inv, dd + 1.0);
  r.resolution_size = std::pow(kk, dd) * std::pow(inv, 2.0 * dd / 3.0);
  r.advantage = r.pencil_size / r.resolution_size;
}

// 2^τ <= bound, allowing for the rounding of the bound itself.
bool within(double points, double bound) { return points <= bound * (1.0 + 1e-12); }

}  // namespace

SizeReport size_report(const CoresetPlan& plan) {
  SizeReport r;
  fill_asymptotics(r, plan.k_star, plan.epsilon, plan.coarse.dim());
  r.total_points = 1.0;
  for (std::size_t t = 0; t < plan.coarse.dim(); ++t) {
    r.axis_points.push_back(plan.coarse.axis_count(t));
    r.total_points *= static_cast<double>(plan.coarse.axis_count(t));
  }
  r.bound_checked = plan.k_star >= 2;
  if (r.bound_checked) {
    for (auto points : r.axis_points) r.bound_holds = r.bound_holds && within(static_cast<double>(points), r.axis_bound);
    r.bound_holds = r.bound_holds && within(r.total_points, r.total_bound);
  }
  return r;
}

SizeReport size_report(int k, double epsilon, std::size_t d) {
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  const int tau = tau_star(k, epsilon);
  SizeReport r;
  fill_asymptotics(r, k, epsilon, d);
  r.axis_points.assign(d, std::uint64_t{1} << tau);
  r.total_points = std::pow(std::ldexp(1.0, tau), static_cast<double>(d));
  r.bound_checked = true;
  r.bound_holds = within(std::ldexp(1.0, tau), r.axis_bound) && within(r.total_points, r.total_bound);
  return r;
}

bool TrialCertificate::ok() const {
  return margin_b >= -kMarginTolerance && margin_a >= -kMarginTolerance && sandwich_margin >= -kMarginTolerance &&
         identity_residual <= kIdentityTolerance * (1.0 + extended_cost) && duality_gap <= kGapTolerance &&
         compatible && fractional_ok;
}

TrialCertificate certify_trial(const Instance& instance, const CoresetPlan& plan, const std::vector<Point>& sites,
                               const SolveOptions& options) {
  const PropertyBReport b = verify_property_b(sites, instance, plan, options);
  TrialCertificate cert;
  cert.full_cost = b.full.objective;
  cert.coarse_cost = b.coarse.objective;
  cert.delta = plan.delta;
  cert.margin_b = b.margin;

  const Clustering extended = extend_to_fine(b.coarse.clustering, plan);
  cert.extended_cost = cost_sites(extended, sites, plan.fine);
  const double eps = plan.epsilon;
  cert.margin_a = cert.coarse_cost + cert.delta - (1.0 - eps) * cert.extended_cost;
  cert.sandwich_margin = (1.0 + eps) / (1.0 - eps) * cert.full_cost - cert.extended_cost;
  cert.quality_ratio = cert.full_cost > 0.0 ? cert.extended_cost / cert.full_cost : 1.0;
  cert.identity_residual = std::abs(cert.extended_cost - cert.coarse_cost - cert.delta);
  cert.duality_gap = std::max(relative_gap(b.full), relative_gap(b.coarse));

  const std::size_t limit = 2 * (static_cast<std::size_t>(instance.k) - 1);
  cert.fractional_full = b.full.fractional_count;
  cert.fractional_coarse = b.coarse.fractional_count;
  cert.fractional_ok = cert.fractional_full <= limit && cert.fractional_coarse <= limit;
  cert.pivots_full = b.full.pivots;
  cert.pivots_coarse = b.coarse.pivots;

  for (const auto* r : {&b.full, &b.coarse}) {
    const Resolution& at = r == &b.full ? plan.fine : plan.coarse;
    const CompatibilityReport compat =
        check_compatibility(r->clustering, from_duals(sites, r->duals), at, /*strong=*/true);
    cert.compat_violation = std::max(cert.compat_violation, compat.worst_violation);
    cert.compatible = cert.compatible && compat.compatible;
    cert.strongly_compatible = cert.strongly_compatible && compat.strongly_compatible;
  }
  return cert;
}

TransferReport check_transfer(const Instance& instance, const std::vector<Point>& sites, double epsilon,
                              const SolveOptions& options) {
  if (!instance.norms) throw std::invalid_argument("transfer check needs a norm family");
  require_epsilon(epsilon);
  Instance isotropic = instance;
  isotropic.norms.reset();

  TransferReport report;
  report.plan = make_plan(std::max(instance.k, 2), epsilon / 3.0, instance.rho);
  const SolveResult coarse = solve_assignment(isotropic, report.plan.coarse, sites, options);
  const Clustering extended = extend_to_fine(coarse.clustering, report.plan);
  const SolveResult full = solve_assignment(instance, instance.rho, sites, options);

  report.bound = transfer_bound(1.0, epsilon, *instance.norms);
  report.full_cost = full.objective;
  report.extended_cost = cost_sites(extended, sites, instance.rho, *instance.norms);
  report.ratio = report.full_cost > 0.0 ? report.extended_cost / report.full_cost : 1.0;
  report.holds = report.extended_cost <= report.bound * report.full_cost + kMarginTolerance;
  return report;
}

}  // namespace rescore
