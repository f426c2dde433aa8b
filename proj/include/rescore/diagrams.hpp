#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rescore/grid.hpp"
#include "rescore/model.hpp"

namespace rescore {

inline constexpr double kBoundaryTolerance = 1e-9;

/// Power diagram with sites s_i and sizes γ_i; cell i collects the points
/// whose power ||x - s_i||^2 + γ_i is minimal.  Cells are never built
/// explicitly, membership is evaluated per point.
struct PowerDiagram {
  std::vector<Point> sites;
  std::vector<double> sizes;

  std::size_t cells() const { return sites.size(); }
  double power(std::size_t i, std::span<const double> x) const;
};

/// Diagram certifying an optimal assignment: γ_i = -μ_i, so a support arc
/// (i, j) attaining min_l (c_lj - μ_l) places x_j in cell i.
PowerDiagram from_duals(std::vector<Point> sites, std::span<const double> duals);

struct CellAssignment {
  std::size_t cell = 0;      // lowest index among minimizers
  bool on_boundary = false;  // runner-up within kBoundaryTolerance
};

CellAssignment assign(const PowerDiagram& diagram, std::span<const double> x);

struct CompatibilityReport {
  bool compatible = true;         // supp(C_i) ⊆ P_i for all i
  bool strongly_compatible = true;  // additionally interior points of P_i ∩ X lie in supp(C_i)
  double worst_violation = 0.0;   // max over support of own power minus best power
  std::size_t violating_points = 0;
  std::size_t boundary_points = 0;
};

/// With `strong` unset the strong check is skipped and reported as false.
CompatibilityReport check_compatibility(const Clustering& c, const PowerDiagram& diagram, const Resolution& res,
                                        bool strong);

}  // namespace rescore
