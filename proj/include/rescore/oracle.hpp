#pragma once

#include <cstdint>
#include <vector>

#include "rescore/grid.hpp"
#include "rescore/model.hpp"

// Reference computations that do not go through the LP solver.

namespace rescore::oracle {

struct Opt1DResult {
  double cost = 0.0;
  std::vector<std::uint64_t> sizes;       // consecutive cluster sizes, left to right
  std::vector<std::uint64_t> boundaries;  // exclusive end index of every cluster
  std::vector<double> centroids;
};

/// Optimal unconstrained least-squares k-clustering of the 1D grid X(rho).
///
/// Optimal 1D clusters are intervals and the scatter of α consecutive grid
/// points is α(α²-1) / (3·2^(3ρ+2)) wherever the interval sits, so the DP runs
/// over interval lengths in exact integer arithmetic.  Since that cost is
/// convex in α, the optimal split point is monotone and each DP layer is
/// filled by divide and conquer.  Ties prefer the shorter first interval.
Opt1DResult opt1d_dp(int rho, std::uint64_t k);

/// Closed-form optimum for 2^gamma clusters:
///   (1/3) 2^(-2(rho+1)) (2^(2(rho-gamma)) - 1).
double opt1d_closed(int rho, int gamma);

/// Lower bound on every k-site clustering cost of X(rho):
///   (1/3) 2^(-2(rho+1)) (2^(2(rho-1)) / k² - 1), floored at zero.
double lower_bound_1d(int rho, std::uint64_t k);

struct BruteForceResult {
  std::vector<std::uint32_t> labels;
  double cost = 0.0;
};

inline constexpr std::uint64_t kBruteForceMaxPoints = 8;
inline constexpr int kBruteForceMaxClusters = 3;

/// Exhaustive minimum over integer weight-feasible clusterings of the
/// instance grid with the given sites.  Throws std::invalid_argument beyond
/// 8 points or 3 clusters.
BruteForceResult brute_force_constrained(const Instance& instance, const std::vector<Point>& sites);

}  // namespace rescore::oracle
