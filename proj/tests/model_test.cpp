#include "doctest.h"
#include "helpers.hpp"
#include "rescore/model.hpp"

using namespace rescore;
using rescore::testing::make_instance;
using rescore::testing::random_clustering;
using rescore::testing::random_sites;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

Eigen::MatrixXd random_spd(std::mt19937_64& eng, double lo, double hi) {
  const double angle = uniform(eng, 0.0, 3.141592653589793);
  Eigen::MatrixXd q(2, 2);
  q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  Eigen::VectorXd l(2);
  l << uniform(eng, lo, hi), uniform(eng, lo, hi);
  Eigen::MatrixXd a = q * l.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

}  // namespace

TEST_CASE("instance validation") {
  CHECK_NOTHROW(make_instance({2}, {0.25, 0.75}));
  CHECK_THROWS_AS(make_instance({2}, {0.25, 0.5}), std::invalid_argument);    // sum != 1
  CHECK_THROWS_AS(make_instance({2}, {0.125, 0.875}), std::invalid_argument); // not a multiple of 1/4
  CHECK_THROWS_AS(make_instance({2}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_instance({2}, {0.5, 0.5}, std::nullopt, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(make_instance({2}, {0.5, 0.5}, std::nullopt, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_instance({2}, {0.5, 0.5}, std::vector<Point>{{0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_instance({2}, {0.5, 0.5}, std::vector<Point>{{0.1}, {0.2, 0.3}}), std::invalid_argument);

  Instance inst = make_instance({1, 1}, {0.5, 0.5});
  inst.norms = NormFamily::identity(3, 2);
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
}

TEST_CASE("clustering construction") {
  const Clustering c = Clustering::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 0.25}, {1, 1, 0.25}, {1, 1, 0.5}});
  CHECK(c.value(1, 1) == 0.75);
  CHECK(c.nonzeros() == 3);
  CHECK(c.fractional_count() == 2);
  CHECK_FALSE(c.is_integer());
  CHECK_THROWS_AS(Clustering::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(Clustering::from_triplets(2, 1, {{2, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Clustering::from_triplets(2, 1, {{0, 0, 1.5}, {1, 0, -0.5}}), std::invalid_argument);

  const std::vector<std::uint32_t> labels{1, 0, 1};
  const Clustering l = Clustering::from_labels(2, labels);
  CHECK(l.is_integer());
  CHECK(l == Clustering::from_dense(2, 3, std::vector<double>{0, 1, 0, 1, 0, 1}));
}

TEST_CASE("cluster weights and constraints") {
  const Resolution rho({1});
  const Clustering c = Clustering::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 0.5}, {1, 1, 0.5}});
  CHECK(cluster_weights(c, rho) == std::vector<double>{0.75, 0.25});

  const Instance half = make_instance({1}, {0.5, 0.5});
  const ConstraintCheck bad = check_constraints(c, half);
  CHECK_FALSE(bad.satisfied);
  CHECK(bad.max_violation == 0.25);

  const Clustering exact = Clustering::from_labels(2, std::vector<std::uint32_t>{0, 1});
  const ConstraintCheck good = check_constraints(exact, half);
  CHECK(good.satisfied);
  CHECK(good.max_violation == 0.0);

  const Clustering nudged = Clustering::from_triplets(2, 2, {{0, 0, 1.0 - 1e-12}, {1, 0, 1e-12}, {1, 1, 1.0}});
  CHECK(check_constraints(nudged, half).satisfied);

  CHECK_THROWS_AS(check_constraints(exact, make_instance({1}, {1.0})), std::invalid_argument);

  SUBCASE("weights always sum to one") {
    std::mt19937_64 eng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const Resolution r({3, 2});
      const auto w = cluster_weights(random_clustering(eng, 4, r.size()), r);
      CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("site costs") {
  const Resolution one({1});
  const Clustering all = Clustering::from_labels(1, std::vector<std::uint32_t>{0, 0});
  const std::vector<Point> mid{{0.5}};
  CHECK(cost_sites(all, mid, one) == 0.0625);

  Eigen::MatrixXd four(1, 1);
  four << 4.0;
  CHECK(cost_sites(all, mid, one, NormFamily({four})) == 0.25);

  // k = n, every point its own site
  const Resolution r({2, 1});
  std::vector<std::uint32_t> labels;
  std::vector<Point> own;
  for (std::uint64_t j = 0; j < r.size(); ++j) {
    labels.push_back(static_cast<std::uint32_t>(j));
    own.push_back(point_coords(r, j));
  }
  CHECK(cost_sites(Clustering::from_labels(r.size(), labels), own, r) == 0.0);

  CHECK_THROWS_AS(cost_sites(all, std::vector<Point>{{0.5}, {0.5}}, one), std::invalid_argument);
  CHECK_THROWS_AS(cost_sites(all, std::vector<Point>{{0.5, 0.5}}, one), std::invalid_argument);
}

TEST_CASE("centroids") {
  const Resolution r({2, 2});
  const Clustering all = Clustering::from_labels(1, std::vector<std::uint32_t>(16, 0));
  CHECK(centroids(all, r) == std::vector<Point>{{0.5, 0.5}});

  const Resolution line({2});
  const Clustering halves = Clustering::from_labels(2, std::vector<std::uint32_t>{0, 0, 1, 1});
  CHECK(centroids(halves, line) == std::vector<Point>{{0.25}, {0.75}});
  CHECK(cost_centroid(halves, line) == 0.015625);

  const Clustering empty = Clustering::from_labels(3, std::vector<std::uint32_t>{0, 0, 1, 1});
  CHECK_THROWS_AS(centroids(empty, line), std::domain_error);

  SUBCASE("centroids beat every other site") {
    std::mt19937_64 eng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const Clustering c = random_clustering(eng, 3, r.size());
      const auto cs = centroids(c, r);
      const auto best = cluster_costs(c, cs, r);
      for (int alt = 0; alt < 50; ++alt) {
        const auto other = cluster_costs(c, random_sites(eng, 3, 2, 20), r);
        for (std::size_t i = 0; i < 3; ++i) CHECK(other[i] >= best[i] - 1e-15);
      }
    }
  }
}

TEST_CASE("eigen bounds") {
  const EigenBounds id = eigen_bounds(NormFamily::identity(3, 2));
  CHECK(id.lambda_min == 1.0);
  CHECK(id.lambda_max == 1.0);

  const EigenBounds diag = eigen_bounds(NormFamily({mat2(1, 0, 0, 4), mat2(2, 0, 0, 3)}));
  CHECK(diag.lambda_min == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(diag.lambda_max == doctest::Approx(4.0).epsilon(1e-10));

  const EigenBounds full = eigen_bounds(NormFamily({mat2(2, 1, 1, 2)}));
  CHECK(full.lambda_min == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(full.lambda_max == doctest::Approx(3.0).epsilon(1e-10));

  CHECK_THROWS_AS(NormFamily({mat2(1, 2, 2, 1)}), std::invalid_argument);    // indefinite
  CHECK_THROWS_AS(NormFamily({mat2(1, 0.5, 0, 1)}), std::invalid_argument);  // not symmetric
  CHECK_THROWS_AS(NormFamily({mat2(1, 0, 0, 1), Eigen::MatrixXd::Identity(3, 3)}), std::invalid_argument);
  CHECK_THROWS_AS(NormFamily(std::vector<Eigen::MatrixXd>{}), std::invalid_argument);
}

TEST_CASE("isotropic cost separates over axes") {
  std::mt19937_64 eng(5);
  const Resolution r({3, 2});
  for (int trial = 0; trial < 20; ++trial) {
    const Clustering c = random_clustering(eng, 3, r.size());
    const auto sites = random_sites(eng, 3, 2);
    const double total = cost_sites(c, sites, r);
    double per_axis = 0.0;
    for (std::size_t t = 0; t < 2; ++t) {
      const double nu = voxel_volume(r).to_double();
      for (std::uint64_t j = 0; j < r.size(); ++j) {
        const Point x = point_coords(r, j);
        for (const auto& e : c.column(j)) {
          const double diff = x[t] - sites[e.cluster][t];
          per_axis += e.fraction * nu * diff * diff;
        }
      }
    }
    CHECK(total == doctest::Approx(per_axis).epsilon(1e-12));
  }
}

TEST_CASE("anisotropic cost is sandwiched by the eigenvalues") {
  std::mt19937_64 eng(17);
  const Resolution r({3, 3});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Eigen::MatrixXd> mats;
    for (int i = 0; i < 3; ++i) mats.push_back(random_spd(eng, 0.5, 5.0));
    const NormFamily norms(mats);
    const Clustering c = random_clustering(eng, 3, r.size());
    const auto sites = random_sites(eng, 3, 2);
    const double iso = cost_sites(c, sites, r);
    const double aniso = cost_sites(c, sites, r, norms);
    CHECK(norms.lambda_min() * iso <= aniso * (1 + 1e-12));
    CHECK(aniso <= norms.lambda_max() * iso * (1 + 1e-12));
  }
}
