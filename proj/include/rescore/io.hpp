#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rescore/coreset.hpp"
#include "rescore/model.hpp"

namespace rescore::io {

/// Instance file schema (JSON object):
///
///   d         integer, optional (checked against rho)
///   rho       array of d nonnegative integers
///   k         integer
///   kappa     k weights; each a decimal number or a [numerator, log2_denominator] pair
///   sites     optional, k arrays of d numbers
///   matrices  optional, k arrays of d*d numbers (row-major SPD)
///   epsilon   number in (0, 1/2], default 0.5
///   plan      optional {"rho", "tau", "delta", "epsilon", "k_star"}, written by `coarsen`
///
/// Parsing validates the instance; violations throw std::invalid_argument.
struct InstanceFile {
  Instance instance;
  std::optional<CoresetPlan> plan;
};

InstanceFile instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const Instance& instance, const std::optional<CoresetPlan>& plan = std::nullopt);

InstanceFile read_instance(const std::filesystem::path& path);
void write_json(const nlohmann::json& j, std::ostream& out);

/// One CSV line per (instance, resolution) run.  The column set is fixed.
struct ReportRow {
  std::string instance_id;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::string level;       // "full" or "coarse"
  std::string resolution;  // exponents joined by 'x'
  int k = 0;
  double epsilon = 0.0;
  double objective = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  double extended_cost = 0.0;
  double quality_ratio = 0.0;
  std::size_t fractional = 0;
  double duality_gap = 0.0;
  double compat_violation = 0.0;
  std::uint64_t pivots = 0;
  double wall_ms = 0.0;
  double speedup = 0.0;
  bool ok = true;
};

std::string csv_header();
std::string to_csv(const ReportRow& row);
std::string resolution_label(const Resolution& res);

/// Shortest decimal that round-trips the double.
std::string format_double(double value);

}  // namespace rescore::io
