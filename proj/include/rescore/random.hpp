#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rescore {

/// A named, splittable seed.  Every randomized component derives its own
/// stream (`derive("instance")`, `derive("trial").derive(t)`) from one 64-bit
/// root seed, so adding draws to one stream never perturbs another.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : seed_(seed) {}

  SeedStream derive(std::string_view name) const;
  SeedStream derive(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64 engine() const { return std::mt19937_64(seed_); }

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Uniform double in [0,1) from the top 53 bits; platform independent.
double uniform01(std::mt19937_64& engine);
double uniform(std::mt19937_64& engine, double lo, double hi);
/// Uniform integer in [lo, hi].
std::int64_t uniform_int(std::mt19937_64& engine, std::int64_t lo, std::int64_t hi);
/// Uniform multiple of 2^-bits in [0,1).
double uniform_dyadic(std::mt19937_64& engine, int bits);

}  // namespace rescore
