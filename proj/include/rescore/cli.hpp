#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rescore/model.hpp"

namespace rescore {

struct GenOptions {
  Resolution rho;
  int k = 2;
  std::uint64_t seed = 0;
  std::optional<std::pair<double, double>> anisotropy;  // eigenvalue range of every A_i
  double epsilon = 0.5;
};

inline constexpr int kGenMaxAttempts = 100;

/// Random power-diagram instance: k sites uniform in [0,1]^d (multiples of
/// 2^-16), sizes uniform in [0, 0.1], κ_i = ν(ρ) · |cell i ∩ X(ρ)|.  Draws
/// are repeated on a fresh stream until every cell is nonempty.
///
/// Throws std::invalid_argument if k exceeds the grid size and
/// std::runtime_error once kGenMaxAttempts draws failed.
Instance generate_instance(const GenOptions& options);

/// Random sites for trial t, derived from `seed` alone.
std::vector<Point> trial_sites(std::uint64_t seed, std::uint64_t trial, std::size_t k, std::size_t d);

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kValidation = 2;
inline constexpr int kViolation = 3;
}  // namespace exit_code

/// Entry point of the `rescore` command line tool.  `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rescore
