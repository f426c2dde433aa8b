#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rescore/grid.hpp"
#include "rescore/model.hpp"
#include "rescore/random.hpp"

namespace rescore::testing {

inline Instance make_instance(std::vector<int> rho, const std::vector<double>& kappa,
                              std::optional<std::vector<Point>> sites = std::nullopt, double epsilon = 0.5) {
  Instance inst;
  inst.rho = Resolution(std::move(rho));
  inst.k = static_cast<int>(kappa.size());
  for (double w : kappa) inst.kappa.push_back(Dyadic::from_double(w));
  inst.sites = std::move(sites);
  inst.epsilon = epsilon;
  inst.validate();
  return inst;
}

inline std::vector<Point> random_sites(std::mt19937_64& eng, std::size_t k, std::size_t d, int bits = 16) {
  std::vector<Point> sites(k, Point(d));
  for (auto& s : sites) {
    for (auto& x : s) x = uniform_dyadic(eng, bits);
  }
  return sites;
}

/// Random integer weights summing to one, each a positive multiple of ν(rho).
inline std::vector<double> random_kappa(std::mt19937_64& eng, const Resolution& rho, std::size_t k) {
  const auto n = static_cast<std::int64_t>(rho.size());
  std::vector<std::int64_t> cuts{0, n};
  while (cuts.size() < k + 1) {
    const auto c = uniform_int(eng, 1, n - 1);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> kappa;
  for (std::size_t i = 0; i < k; ++i) kappa.push_back(static_cast<double>(cuts[i + 1] - cuts[i]) / static_cast<double>(n));
  return kappa;
}

/// Random fractional clustering: each point split between up to two clusters.
inline Clustering random_clustering(std::mt19937_64& eng, std::size_t k, std::uint64_t n) {
  std::vector<Clustering::Triplet> triplets;
  for (std::uint64_t j = 0; j < n; ++j) {
    const auto a = static_cast<std::uint32_t>(uniform_int(eng, 0, static_cast<std::int64_t>(k) - 1));
    const auto b = static_cast<std::uint32_t>(uniform_int(eng, 0, static_cast<std::int64_t>(k) - 1));
    const double f = uniform_dyadic(eng, 8);
    triplets.push_back({a, j, f});
    triplets.push_back({b, j, 1.0 - f});
  }
  return Clustering::from_triplets(k, n, std::move(triplets));
}

inline std::vector<std::vector<int>> all_resolutions(std::size_t d, int max_exponent) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(d, 0);
  while (true) {
    out.push_back(e);
    std::size_t t = 0;
    while (t < d && ++e[t] > max_exponent) e[t++] = 0;
    if (t == d) break;
  }
  return out;
}

/// Every τ with 0 <= τ <= ρ componentwise.
inline std::vector<std::vector<int>> coarser_resolutions(const std::vector<int>& rho) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(rho.size(), 0);
  while (true) {
    out.push_back(e);
    std::size_t t = 0;
    while (t < rho.size() && ++e[t] > rho[t]) e[t++] = 0;
    if (t == rho.size()) break;
  }
  return out;
}

}  // namespace rescore::testing
