#include "rescore/diagrams.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rescore {

double PowerDiagram::power(std::size_t i, std::span<const double> x) const {
  return squared_distance(x, sites.at(i)) + sizes.at(i);
}

PowerDiagram from_duals(std::vector<Point> sites, std::span<const double> duals) {
  if (sites.size() != duals.size()) throw std::invalid_argument("need one dual per site");
  PowerDiagram diagram;
  diagram.sites = std::move(sites);
  diagram.sizes.reserve(duals.size());
  for (double mu : duals) diagram.sizes.push_back(-mu);
  return diagram;
}

CellAssignment assign(const PowerDiagram& diagram, std::span<const double> x) {
  if (diagram.cells() == 0) throw std::invalid_argument("empty diagram");
  CellAssignment out;
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < diagram.cells(); ++i) {
    const double p = diagram.power(i, x);
    if (p < best) {
      second = best;
      best = p;
      out.cell = i;
    } else if (p < second) {
      second = p;
    }
  }
  out.on_boundary = second - best <= kBoundaryTolerance;
  return out;
}

CompatibilityReport check_compatibility(const Clustering& c, const PowerDiagram& diagram, const Resolution& res,
                                        bool strong) {
  if (c.clusters() != diagram.cells()) throw std::invalid_argument("cluster count does not match the diagram");
  if (c.points() != res.size()) throw std::invalid_argument("clustering does not match resolution");

  const std::size_t d = res.dim();
  const std::size_t k = diagram.cells();
  const std::vector<double> coords = grid_coordinates(res);
  std::vector<double> powers(k);
  CompatibilityReport report;
  report.strongly_compatible = strong;

  for (std::uint64_t j = 0; j < c.points(); ++j) {
    const std::span<const double> x(coords.data() + j * d, d);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      powers[i] = diagram.power(i, x);
      best = std::min(best, powers[i]);
    }
    bool point_ok = true;
    for (const auto& e : c.column(j)) {
      const double excess = powers[e.cluster] - best;
      report.worst_violation = std::max(report.worst_violation, excess);
      if (excess > kBoundaryTolerance) point_ok = false;
    }
    if (!point_ok) {
      report.compatible = false;
      ++report.violating_points;
    }

    const CellAssignment cell = assign(diagram, x);
    if (cell.on_boundary) {
      ++report.boundary_points;
    } else if (strong && c.value(cell.cell, j) == 0.0) {
      // interior point of P_i that cluster i does not use
      report.strongly_compatible = false;
    }
  }
  if (!report.compatible) report.strongly_compatible = false;
  return report;
}

}  // namespace rescore
