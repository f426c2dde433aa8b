#include "rescore/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rescore::io {
namespace {

using nlohmann::json;

Dyadic parse_weight(const json& w) {
  if (w.is_number()) return Dyadic::from_double(w.get<double>());
  if (w.is_array() && w.size() == 2 && w[0].is_number_integer() && w[1].is_number_integer()) {
    const auto numerator = w[0].get<std::int64_t>();
    const auto log2_den = w[1].get<int>();
    return Dyadic(numerator, -log2_den);
  }
  throw std::invalid_argument("kappa entries must be numbers or [numerator, log2_denominator] pairs");
}

std::vector<int> parse_exponents(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw std::invalid_argument(std::string("missing array '") + key + "'");
  std::vector<int> exps;
  for (const auto& e : j.at(key)) {
    if (!e.is_number_integer()) throw std::invalid_argument(std::string("'") + key + "' must hold integers");
    exps.push_back(e.get<int>());
  }
  return exps;
}

}  // namespace

InstanceFile instance_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("instance must be a JSON object");
  InstanceFile file;
  Instance& inst = file.instance;
  inst.rho = Resolution(parse_exponents(j, "rho"));
  if (j.contains("d") && j.at("d").get<std::size_t>() != inst.rho.dim()) {
    throw std::invalid_argument("'d' does not match the length of 'rho'");
  }
  if (!j.contains("k")) throw std::invalid_argument("missing 'k'");
  inst.k = j.at("k").get<int>();
  if (!j.contains("kappa") || !j.at("kappa").is_array()) throw std::invalid_argument("missing array 'kappa'");
  for (const auto& w : j.at("kappa")) inst.kappa.push_back(parse_weight(w));
  inst.epsilon = j.value("epsilon", 0.5);

  if (j.contains("sites") && !j.at("sites").is_null()) {
    std::vector<Point> sites;
    for (const auto& s : j.at("sites")) sites.push_back(s.get<Point>());
    inst.sites = std::move(sites);
  }
  if (j.contains("matrices") && !j.at("matrices").is_null()) {
    const auto d = static_cast<Eigen::Index>(inst.rho.dim());
    std::vector<Eigen::MatrixXd> mats;
    for (const auto& m : j.at("matrices")) {
      const auto values = m.get<std::vector<double>>();
      if (values.size() != static_cast<std::size_t>(d * d)) throw std::invalid_argument("matrices must hold d*d entries");
      Eigen::MatrixXd a(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) a(r, c) = values[static_cast<std::size_t>(r * d + c)];
      }
      mats.push_back(std::move(a));
    }
    inst.norms = NormFamily(std::move(mats));
  }
  inst.validate();

  if (j.contains("plan") && !j.at("plan").is_null()) {
    const json& p = j.at("plan");
    CoresetPlan plan;
    plan.fine = Resolution(parse_exponents(p, "rho"));
    plan.coarse = Resolution(parse_exponents(p, "tau"));
    if (!(plan.fine == inst.rho)) throw std::invalid_argument("plan rho differs from instance rho");
    if (!plan.coarse.coarser_or_equal(plan.fine)) throw std::invalid_argument("plan tau must be <= rho");
    plan.epsilon = p.value("epsilon", inst.epsilon);
    plan.k_star = p.value("k_star", inst.k);
    plan.clamped = p.value("clamped", false);
    plan.delta = delta_offset(plan.fine, plan.coarse);
    file.plan = plan;
  }
  return file;
}

json instance_to_json(const Instance& instance, const std::optional<CoresetPlan>& plan) {
  json j;
  j["d"] = instance.dim();
  j["rho"] = std::vector<int>(instance.rho.exponents().begin(), instance.rho.exponents().end());
  j["k"] = instance.k;
  j["kappa"] = instance.kappa_values();
  if (instance.sites) j["sites"] = *instance.sites;
  if (instance.norms) {
    json mats = json::array();
    for (const auto& a : instance.norms->matrices()) {
      std::vector<double> values;
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) values.push_back(a(r, c));
      }
      mats.push_back(values);
    }
    j["matrices"] = mats;
  }
  j["epsilon"] = instance.epsilon;
  if (plan) {
    j["plan"] = {
        {"rho", std::vector<int>(plan->fine.exponents().begin(), plan->fine.exponents().end())},
        {"tau", std::vector<int>(plan->coarse.exponents().begin(), plan->coarse.exponents().end())},
        {"delta", plan->delta},
        {"epsilon", plan->epsilon},
        {"k_star", plan->k_star},
        {"clamped", plan->clamped},
    };
  }
  return j;
}

InstanceFile read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed instance file " + path.string() + ": " + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument("invalid instance file " + path.string() + ": " + e.what());
  }
}

void write_json(const json& j, std::ostream& out) { out << j.dump(2) << '\n'; }

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string resolution_label(const Resolution& res) {
  std::string label;
  for (std::size_t t = 0; t < res.dim(); ++t) {
    if (t) label += 'x';
    label += std::to_string(res.exponent(t));
  }
  return label;
}

std::string csv_header() {
  return "instance_id,trial,seed,level,resolution,k,epsilon,objective,delta,bound,margin,extended_cost,"
         "quality_ratio,fractional,duality_gap,compat_violation,pivots,wall_ms,speedup,ok";
}

std::string to_csv(const ReportRow& r) {
  std::ostringstream out;
  out << r.instance_id << ',' << r.trial << ',' << r.seed << ',' << r.level << ',' << r.resolution << ',' << r.k << ','
      << format_double(r.epsilon) << ',' << format_double(r.objective) << ',' << format_double(r.delta) << ','
      << format_double(r.bound) << ',' << format_double(r.margin) << ',' << format_double(r.extended_cost) << ','
      << format_double(r.quality_ratio) << ',' << r.fractional << ',' << format_double(r.duality_gap) << ','
      << format_double(r.compat_violation) << ',' << r.pivots << ',' << format_double(r.wall_ms) << ','
      << format_double(r.speedup) << ',' << (r.ok ? 1 : 0);
  return out.str();
}

}  // namespace rescore::io
