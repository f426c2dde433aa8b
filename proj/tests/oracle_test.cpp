#include "doctest.h"
#include "helpers.hpp"
#include "rescore/oracle.hpp"

using namespace rescore;
using rescore::testing::make_instance;

TEST_CASE("1D optimum by dynamic programming") {
  const oracle::Opt1DResult all = oracle::opt1d_dp(3, 8);
  CHECK(all.cost == 0.0);
  CHECK(all.sizes == std::vector<std::uint64_t>(8, 1));

  const oracle::Opt1DResult four = oracle::opt1d_dp(4, 4);
  CHECK(four.cost == 15.0 / 3072.0);
  CHECK(four.cost == 0.0048828125);
  CHECK(four.sizes == std::vector<std::uint64_t>{4, 4, 4, 4});
  CHECK(four.boundaries == std::vector<std::uint64_t>{4, 8, 12, 16});
  CHECK(four.centroids == std::vector<double>{0.125, 0.375, 0.625, 0.875});

  CHECK(oracle::opt1d_dp(3, 2).cost == 15.0 / 768.0);

  // 4 points into 3 intervals: ties put the short intervals first
  CHECK(oracle::opt1d_dp(2, 3).sizes == std::vector<std::uint64_t>{1, 1, 2});

  CHECK_THROWS_AS(oracle::opt1d_dp(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(oracle::opt1d_dp(3, 9), std::invalid_argument);
  CHECK_THROWS_AS(oracle::opt1d_dp(17, 2), std::invalid_argument);
}

TEST_CASE("DP cost matches a pointwise recomputation") {
  for (int rho = 1; rho <= 6; ++rho) {
    for (std::uint64_t k = 1; k <= 6 && k <= (std::uint64_t{1} << rho); ++k) {
      const oracle::Opt1DResult r = oracle::opt1d_dp(rho, k);
      const Resolution res({rho});
      const double nu = std::ldexp(1.0, -rho);
      double cost = 0.0;
      std::uint64_t start = 0;
      for (std::size_t c = 0; c < r.sizes.size(); ++c) {
        CHECK(r.sizes[c] > 0);
        for (std::uint64_t j = start; j < r.boundaries[c]; ++j) {
          const double d = point_coords(res, j)[0] - r.centroids[c];
          cost += nu * d * d;
        }
        start = r.boundaries[c];
      }
      CHECK(start == res.size());
      CHECK(r.cost == doctest::Approx(cost).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed form at powers of two") {
  CHECK(oracle::opt1d_closed(4, 4) == 0.0);
  CHECK(oracle::opt1d_closed(4, 2) == 0.0048828125);
  CHECK(oracle::opt1d_closed(5, 1) == doctest::Approx(255.0 / 12288.0).epsilon(1e-15));
  CHECK_THROWS_AS(oracle::opt1d_closed(3, 4), std::invalid_argument);
  for (int rho = 0; rho <= 8; ++rho) {
    for (int gamma = 0; gamma <= rho; ++gamma) {
      const auto k = std::uint64_t{1} << gamma;
      const oracle::Opt1DResult r = oracle::opt1d_dp(rho, k);
      CHECK(r.cost == doctest::Approx(oracle::opt1d_closed(rho, gamma)).epsilon(1e-12));
      CHECK(r.sizes == std::vector<std::uint64_t>(k, std::uint64_t{1} << (rho - gamma)));
    }
  }
}

TEST_CASE("DP optimum is non-increasing in k") {
  for (int rho = 1; rho <= 7; ++rho) {
    double prev = oracle::opt1d_dp(rho, 1).cost;
    for (std::uint64_t k = 2; k <= std::min<std::uint64_t>(12, std::uint64_t{1} << rho); ++k) {
      const double c = oracle::opt1d_dp(rho, k).cost;
      CHECK(c <= prev);
      prev = c;
    }
  }
}

TEST_CASE("lower bound") {
  CHECK(oracle::lower_bound_1d(5, 3) == doctest::Approx((256.0 / 9.0 - 1.0) / 12288.0).epsilon(1e-14));
  CHECK(oracle::lower_bound_1d(5, 3) == doctest::Approx(0.00223345).epsilon(1e-5));
  CHECK(oracle::lower_bound_1d(4, 8) == 0.0);
  CHECK(oracle::lower_bound_1d(4, 9) == 0.0);
  CHECK_THROWS_AS(oracle::lower_bound_1d(4, 0), std::invalid_argument);
  for (int rho = 1; rho <= 10; ++rho) {
    for (std::uint64_t k = 2; k <= 8 && k <= (std::uint64_t{1} << rho); ++k) {
      CHECK(oracle::lower_bound_1d(rho, k) <= oracle::opt1d_dp(rho, k).cost);
    }
  }
}

TEST_CASE("exhaustive constrained optimum") {
  const Instance single = make_instance({2}, {1.0}, std::vector<Point>{{0.4}});
  const oracle::BruteForceResult s = oracle::brute_force_constrained(single, *single.sites);
  CHECK(s.labels == std::vector<std::uint32_t>(4, 0));

  const Instance two = make_instance({1}, {0.5, 0.5}, std::vector<Point>{{0.2}, {0.9}});
  const oracle::BruteForceResult t = oracle::brute_force_constrained(two, *two.sites);
  CHECK(t.labels == std::vector<std::uint32_t>{0, 1});
  CHECK(t.cost == doctest::Approx(0.0125).epsilon(1e-15));

  // mirrored sites and weights give the mirrored optimum at the same cost
  const Instance a = make_instance({3}, {0.25, 0.75}, std::vector<Point>{{0.1}, {0.7}});
  const Instance b = make_instance({3}, {0.75, 0.25}, std::vector<Point>{{0.3}, {0.9}});
  CHECK(oracle::brute_force_constrained(a, *a.sites).cost ==
        doctest::Approx(oracle::brute_force_constrained(b, *b.sites).cost).epsilon(1e-14));

  const Instance big = make_instance({4}, {0.5, 0.5}, std::vector<Point>{{0.2}, {0.9}});
  CHECK_THROWS_AS(oracle::brute_force_constrained(big, *big.sites), std::invalid_argument);
  const Instance many = make_instance({2}, {0.25, 0.25, 0.25, 0.25});
  CHECK_THROWS_AS(oracle::brute_force_constrained(many, std::vector<Point>(4, Point{0.5})), std::invalid_argument);
}
