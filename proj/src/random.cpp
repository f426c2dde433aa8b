#include "rescore/random.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rescore {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeedStream SeedStream::derive(std::string_view name) const {
  // FNV-1a over the name, mixed with the parent seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return SeedStream(splitmix64(seed_ ^ splitmix64(h)));
}

SeedStream SeedStream::derive(std::uint64_t index) const {
  return SeedStream(splitmix64(splitmix64(seed_) + 0x632be59bd9b4e019ULL * (index + 1)));
}

double uniform01(std::mt19937_64& engine) { return std::ldexp(static_cast<double>(engine() >> 11), -53); }

double uniform(std::mt19937_64& engine, double lo, double hi) { return lo + (hi - lo) * uniform01(engine); }

std::int64_t uniform_int(std::mt19937_64& engine, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("empty integer range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine());
  // rejection sampling keeps the draw unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t r;
  do {
    r = engine();
  } while (r >= limit);
  return lo + static_cast<std::int64_t>(r % span);
}

double uniform_dyadic(std::mt19937_64& engine, int bits) {
  return std::ldexp(static_cast<double>(engine() >> (64 - bits)), -bits);
}

}  // namespace rescore
