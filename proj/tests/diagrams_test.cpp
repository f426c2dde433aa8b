#include "doctest.h"
#include "helpers.hpp"
#include "rescore/diagrams.hpp"
#include "rescore/solver.hpp"

using namespace rescore;
using rescore::testing::make_instance;
using rescore::testing::random_kappa;
using rescore::testing::random_sites;

TEST_CASE("equal duals give a Voronoi diagram") {
  const std::vector<Point> sites{{0.1, 0.1}, {0.8, 0.3}, {0.4, 0.9}};
  const std::vector<double> mu{0.2, 0.2, 0.2};
  const PowerDiagram p = from_duals(sites, mu);
  std::mt19937_64 eng(2);
  for (int t = 0; t < 100; ++t) {
    const Point x{uniform01(eng), uniform01(eng)};
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < 3; ++i) {
      if (squared_distance(x, sites[i]) < squared_distance(x, sites[nearest])) nearest = i;
    }
    CHECK(assign(p, x).cell == nearest);
  }
  CHECK_THROWS_AS(from_duals(sites, std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("two cells on a line") {
  // sizes (0, 0.1): (x - 0.2)² = (x - 0.9)² + 0.1 at x = 0.87 / 1.4
  const PowerDiagram p{{{0.2}, {0.9}}, {0.0, 0.1}};
  const double boundary = 0.87 / 1.4;
  CHECK(boundary == doctest::Approx(0.6214).epsilon(1e-4));
  const std::vector<double> at{boundary};
  CHECK(std::abs(p.power(0, at) - p.power(1, at)) <= 1e-15);
  CHECK(assign(p, at).on_boundary);
  CHECK(assign(p, std::vector<double>{0.5}).cell == 0);  // 0.09 against 0.26
  CHECK(assign(p, std::vector<double>{0.7}).cell == 1);

  // γ = -μ, so the same diagram comes from μ = (0, -0.1)
  const PowerDiagram q = from_duals({{0.2}, {0.9}}, std::vector<double>{0.0, -0.1});
  CHECK(q.sizes == std::vector<double>{0.0, 0.1});

  // and μ = (0, 0.1) moves the boundary to 0.67 / 1.4
  const PowerDiagram r = from_duals({{0.2}, {0.9}}, std::vector<double>{0.0, 0.1});
  const std::vector<double> other{0.67 / 1.4};
  CHECK(std::abs(r.power(0, other) - r.power(1, other)) <= 1e-15);
}

TEST_CASE("split point of an optimal solve sits on the boundary") {
  const Instance inst = make_instance({2}, {0.25, 0.75}, std::vector<Point>{{0.2}, {0.9}});
  const SolveResult r = solve_assignment(inst, Resolution({1}));
  const PowerDiagram p = from_duals(*inst.sites, r.duals);
  const std::vector<double> split{0.25};
  CHECK(std::abs(p.power(0, split) - p.power(1, split)) <= 1e-9);
  CHECK(assign(p, split).on_boundary);
  CHECK(assign(p, std::vector<double>{0.75}).cell == 1);
}

TEST_CASE("assignment ties") {
  const PowerDiagram p{{{0.25, 0.5}, {0.75, 0.5}}, {0.0, 0.0}};
  const CellAssignment mid = assign(p, std::vector<double>{0.5, 0.5});
  CHECK(mid.cell == 0);
  CHECK(mid.on_boundary);
  const CellAssignment own = assign(p, std::vector<double>{0.75, 0.5});
  CHECK(own.cell == 1);
  CHECK_FALSE(own.on_boundary);
  CHECK_THROWS_AS(assign(PowerDiagram{}, std::vector<double>{0.5}), std::invalid_argument);
}

TEST_CASE("a common shift of the sizes changes nothing") {
  std::mt19937_64 eng(3);
  for (int trial = 0; trial < 10; ++trial) {
    PowerDiagram p{random_sites(eng, 4, 2, 30), {}};
    for (int i = 0; i < 4; ++i) p.sizes.push_back(uniform(eng, -0.1, 0.1));
    PowerDiagram shifted = p;
    const double c = uniform(eng, -1.0, 1.0);
    for (double& g : shifted.sizes) g += c;
    for (int t = 0; t < 100; ++t) {
      const Point x{uniform01(eng), uniform01(eng)};
      CHECK(assign(p, x).cell == assign(shifted, x).cell);
    }
  }
}

TEST_CASE("compatibility") {
  const Resolution r({2, 2});
  const Clustering one = Clustering::from_labels(1, std::vector<std::uint32_t>(16, 0));
  const CompatibilityReport single = check_compatibility(one, PowerDiagram{{{0.3, 0.3}}, {0.0}}, r, true);
  CHECK(single.compatible);
  CHECK(single.strongly_compatible);

  std::mt19937_64 eng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 3);
    const Instance inst = make_instance({4, 4}, random_kappa(eng, Resolution({4, 4}), k), random_sites(eng, k, 2));
    for (const Resolution at : {Resolution({4, 4}), Resolution({2, 3})}) {
      const SolveResult s = solve_assignment(inst, at);
      const CompatibilityReport c = check_compatibility(s.clustering, from_duals(*inst.sites, s.duals), at, true);
      CHECK(c.compatible);
      CHECK(c.worst_violation <= 1e-9);
      CHECK(c.violating_points == 0);
    }
  }

  SUBCASE("swapping two points of different clusters breaks it") {
    const Instance inst = make_instance({3}, {0.5, 0.5}, std::vector<Point>{{0.2}, {0.8}});
    const SolveResult s = solve_assignment(inst, inst.rho);
    std::vector<std::uint32_t> labels{0, 0, 0, 0, 1, 1, 1, 1};
    CHECK(s.clustering == Clustering::from_labels(2, labels));
    std::swap(labels[0], labels[7]);
    const CompatibilityReport c =
        check_compatibility(Clustering::from_labels(2, labels), from_duals(*inst.sites, s.duals), inst.rho, false);
    CHECK_FALSE(c.compatible);
    CHECK(c.worst_violation > 0.1);
    CHECK(c.violating_points == 2);
    CHECK_FALSE(c.strongly_compatible);
  }
}

TEST_CASE("integer optima lie inside their cells for generic sites") {
  std::mt19937_64 eng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 3);
    const Resolution r({3, 3});
    // fine-grained sites make exact ties unlikely
    const Instance inst = make_instance({3, 3}, random_kappa(eng, r, k), random_sites(eng, k, 2, 26));
    const SolveResult s = solve_assignment(inst, r);
    REQUIRE(s.clustering.is_integer());
    const CompatibilityReport c = check_compatibility(s.clustering, from_duals(*inst.sites, s.duals), r, true);
    CHECK(c.compatible);
    CHECK(c.strongly_compatible);
    CHECK(c.boundary_points == 0);
  }
}
