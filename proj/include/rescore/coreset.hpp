#pragma once

#include <optional>
#include <vector>

#include "rescore/grid.hpp"
#include "rescore/model.hpp"
#include "rescore/solver.hpp"

namespace rescore {

/// Fine resolution ρ, coarse resolution τ <= ρ and the exact additive offset
/// between clustering costs on X(τ) and their extensions to X(ρ).
struct CoresetPlan {
  Resolution fine;
  Resolution coarse;
  double delta = 0.0;
  double epsilon = 0.5;
  int k_star = 0;
  bool clamped = false;  // some axis had ρ_t < τ*
};

/// τ* = ⌈log2(2^(5/3) k / ε^(2/3))⌉.  Throws std::invalid_argument unless
/// k >= 2 and ε in (0, 1/2].
int tau_star(int k, double epsilon);

/// τ_t = min(ρ_t, τ*) on every axis.
Resolution target_resolution(int k, double epsilon, const Resolution& rho);

/// Δ = Σ_t (2^-2τ_t - 2^-2ρ_t) / 12, summed axis by axis.
double delta_offset(const Resolution& fine, const Resolution& coarse);

CoresetPlan make_plan(int k, double epsilon, const Resolution& rho,
                      const std::optional<Resolution>& tau_override = std::nullopt);
CoresetPlan make_plan(const Instance& instance, const std::optional<Resolution>& tau_override = std::nullopt);

/// p(C): average the assignment fractions over every batch.
Clustering restrict_to_coarse(const Clustering& fine, const CoresetPlan& plan);

/// g(C̃): every fine point copies the fractions of its batch representative.
Clustering extend_to_fine(const Clustering& coarse, const CoresetPlan& plan);

struct PropertyAReport {
  double fine_cost = 0.0;    // cost(X, g(C̃), S)
  double coarse_cost = 0.0;  // cost(X̃, C̃, S)
  double delta = 0.0;
  double residual = 0.0;     // |fine - coarse - Δ|
  bool holds = false;        // residual <= 1e-10 (1 + fine)
};

/// Checks cost(X, g(C̃), S) = cost(X̃, C̃, S) + Δ.  Isotropic instances only;
/// throws std::invalid_argument when the instance carries a norm family.
PropertyAReport verify_property_a(const Clustering& coarse, const std::vector<Point>& sites, const Instance& instance,
                                  const CoresetPlan& plan);

struct PropertyBReport {
  SolveResult full;
  SolveResult coarse;
  double delta = 0.0;
  double margin = 0.0;  // (1+ε) cost(X,S) - (cost(X̃,S) + Δ)
  bool holds = false;   // margin >= -1e-9
};

PropertyBReport verify_property_b(const std::vector<Point>& sites, const Instance& instance, const CoresetPlan& plan,
                                  const SolveOptions& options = {});

/// (1+ε) γ λ+/λ-: approximation factor of g(C̃) on the anisotropic instance
/// when C̃ is a γ-approximation on an ε/3 resolution coreset.
double transfer_bound(double gamma, double epsilon, const NormFamily& norms);
double transfer_bound(double gamma, double epsilon);

struct SizeReport {
  std::vector<std::uint64_t> axis_points;  // 2^τ_t
  double total_points = 0.0;
  double axis_bound = 0.0;     // 2^(8/3) k / ε^(2/3)
  double total_bound = 0.0;    // axis_bound^d
  double axis_prose_bound = 0.0;  // 7 k / ε^(2/3)
  bool bound_checked = false;  // false when clamping makes the bound moot
  bool bound_holds = true;
  double pencil_size = 0.0;       // k² / ε^(d+1)
  double resolution_size = 0.0;   // k^d / ε^(2d/3), constants dropped
  double advantage = 0.0;         // pencil_size / resolution_size
};

SizeReport size_report(const CoresetPlan& plan);
/// Unclamped report straight from (k, ε, d).
SizeReport size_report(int k, double epsilon, std::size_t d);

/// Everything measured for one set of sites: full and coarse optima,
/// property (b), the extended coreset optimum, and the power-diagram
/// certificates of both solves.
struct TrialCertificate {
  double full_cost = 0.0;
  double coarse_cost = 0.0;
  double delta = 0.0;
  double extended_cost = 0.0;     // cost(X, g(C̃*), S)
  double margin_b = 0.0;          // (1+ε) full - (coarse + Δ)
  double margin_a = 0.0;          // coarse + Δ - (1-ε) extended
  double sandwich_margin = 0.0;   // (1+ε)/(1-ε) full - extended
  double quality_ratio = 0.0;     // extended / full
  double identity_residual = 0.0; // |extended - coarse - Δ|
  double duality_gap = 0.0;       // worst relative gap over both solves
  double compat_violation = 0.0;  // worst over both solves
  std::size_t fractional_full = 0;
  std::size_t fractional_coarse = 0;
  std::uint64_t pivots_full = 0;
  std::uint64_t pivots_coarse = 0;
  bool fractional_ok = true;
  bool compatible = true;
  bool strongly_compatible = true;

  bool ok() const;
};

inline constexpr double kMarginTolerance = 1e-9;
inline constexpr double kIdentityTolerance = 1e-10;
inline constexpr double kGapTolerance = 1e-9;

TrialCertificate certify_trial(const Instance& instance, const CoresetPlan& plan, const std::vector<Point>& sites,
                               const SolveOptions& options = {});

struct TransferReport {
  CoresetPlan plan;           // built at ε/3
  double bound = 0.0;         // (1+ε) λ+/λ-
  double full_cost = 0.0;     // cost_A(X, S)
  double extended_cost = 0.0; // cost_A(X, g(C̃*), S)
  double ratio = 0.0;
  bool holds = false;
};

/// Solves the isotropic problem on an ε/3 resolution coreset, extends the
/// optimum, and compares its anisotropic cost with the anisotropic optimum.
TransferReport check_transfer(const Instance& instance, const std::vector<Point>& sites, double epsilon,
                              const SolveOptions& options = {});

}  // namespace rescore
