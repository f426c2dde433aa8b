#pragma once

#include <cstdint>
#include <vector>

#include "rescore/grid.hpp"
#include "rescore/model.hpp"

namespace rescore {

/// Which number type carries arc costs inside the network simplex.
enum class Arithmetic {
  kAuto,      // exact integers when every input is dyadic and isotropic
  kExact,     // exact integers or throw
  kFloating,  // double precision
};

/// Transportation view of the assignment problem at resolution `at`: every
/// point of X(at) supplies ν(at), cluster i demands κ_i, and the arc cost is
/// ||x_j - s_i||^2 in the cluster's norm.
struct TransportProblem {
  Resolution at;
  std::vector<Dyadic> demands;
  std::vector<Point> sites;
  const NormFamily* norms = nullptr;  // isotropic when null
};

TransportProblem make_transport_problem(const Instance& instance, const Resolution& at,
                                        const std::vector<Point>& sites);

struct SolveOptions {
  Arithmetic arithmetic = Arithmetic::kAuto;
  std::uint64_t max_arcs = 50'000'000;
};

struct SolveResult {
  Clustering clustering;           // basic optimal solution
  double objective = 0.0;          // Σ ξ ω c
  double dual_objective = 0.0;     // Σ_j ν u_j + Σ_i κ_i μ_i
  std::vector<double> duals;       // μ_i, gauge fixed by μ_0 = 0
  std::size_t fractional_count = 0;
  std::uint64_t pivots = 0;
  bool exact = false;              // integer arithmetic was used

  double duality_gap() const { return objective - dual_objective; }
};

SolveResult solve(const TransportProblem& problem, const SolveOptions& options = {});

/// Optimal weight-constrained assignment of X(at) to the instance's sites.
/// Throws std::invalid_argument for an invalid instance or missing sites and
/// std::length_error when the dense arc set exceeds options.max_arcs.
SolveResult solve_assignment(const Instance& instance, const Resolution& at, const SolveOptions& options = {});
SolveResult solve_assignment(const Instance& instance, const Resolution& at, const std::vector<Point>& sites,
                             const SolveOptions& options = {});

struct AlternateResult {
  std::vector<Point> sites;
  SolveResult result;
  std::vector<double> objectives;  // objective after every assignment step
  int rounds = 0;
};

/// Heuristic for the free-site problem: alternate optimal assignment and
/// centroid updates, starting from sites drawn uniformly in [0,1]^d.  Stops
/// once the relative improvement drops below 1e-9 or after max_rounds.
AlternateResult alternate_minimize(const Instance& instance, int max_rounds, std::uint64_t seed);
AlternateResult alternate_minimize(const Instance& instance, int max_rounds, std::vector<Point> initial_sites);

}  // namespace rescore
