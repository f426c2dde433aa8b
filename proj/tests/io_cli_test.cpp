#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "rescore/cli.hpp"
#include "rescore/io.hpp"

using namespace rescore;
using rescore::testing::make_instance;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rescore_test_" + name);
}

std::string line_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  }
  return {};
}

const std::filesystem::path kFixture = std::filesystem::path(RESCORE_FIXTURE_DIR) / "gen_d1_r3_k2_seed0.json";

}  // namespace

TEST_CASE("json round trip") {
  Instance inst = make_instance({3, 2}, {0.25, 0.75}, std::vector<Point>{{0.1, 0.2}, {0.7, 0.9}}, 0.25);
  Eigen::MatrixXd a(2, 2);
  a << 2, 0.5, 0.5, 1;
  inst.norms = NormFamily({a, Eigen::MatrixXd::Identity(2, 2)});
  const CoresetPlan plan = make_plan(inst, Resolution({1, 1}));

  const nlohmann::json j = io::instance_to_json(inst, plan);
  const io::InstanceFile back = io::instance_from_json(j);
  CHECK(back.instance.rho == inst.rho);
  CHECK(back.instance.kappa == inst.kappa);
  CHECK(*back.instance.sites == *inst.sites);
  CHECK(back.instance.epsilon == 0.25);
  REQUIRE(back.instance.norms);
  CHECK(back.instance.norms->matrix(0).isApprox(a, 0.0));
  REQUIRE(back.plan);
  CHECK(back.plan->coarse == Resolution({1, 1}));
  CHECK(back.plan->delta == plan.delta);
  CHECK(io::instance_to_json(back.instance, back.plan) == j);
}

TEST_CASE("json kappa forms and validation") {
  const auto parse = [](const char* text) { return io::instance_from_json(nlohmann::json::parse(text)); };
  const io::InstanceFile f = parse(R"({"rho": [2], "k": 2, "kappa": [[1, 2], 0.75]})");
  CHECK(f.instance.kappa[0] == Dyadic(1, -2));
  CHECK(f.instance.kappa[1].to_double() == 0.75);
  CHECK(f.instance.epsilon == 0.5);
  CHECK_FALSE(f.instance.sites);

  CHECK_THROWS_AS(parse(R"({"rho": [2], "k": 2, "kappa": [0.5, 0.25]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse(R"({"rho": [2], "k": 3, "kappa": [0.5, 0.5]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse(R"({"d": 2, "rho": [2], "k": 2, "kappa": [0.5, 0.5]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse(R"({"rho": [2], "k": 2, "kappa": [0.5, 0.5], "epsilon": 0.9})"), std::invalid_argument);
  CHECK_THROWS_AS(parse(R"({"rho": [2], "k": 2, "kappa": "x"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse(R"({"rho": [2], "k": 2, "kappa": [0.5, 0.5], "matrices": [[1], [-1]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::read_instance(temp_path("missing.json")), std::invalid_argument);
}

TEST_CASE("csv formatting") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(0.0) == "0");
  CHECK(io::format_double(1e16) == "1e+16");
  CHECK(io::resolution_label(Resolution({6, 3})) == "6x3");
  io::ReportRow row;
  row.instance_id = "x";
  row.level = "full";
  row.resolution = "3";
  row.k = 2;
  row.epsilon = 0.5;
  row.objective = 0.25;
  const std::string line = io::to_csv(row);
  CHECK(line == "x,0,0,full,3,2,0.5,0.25,0,0,0,0,0,0,0,0,0,0,0,1");
  const std::string header = io::csv_header();
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(line.begin(), line.end(), ','));
}

TEST_CASE("generated instances") {
  const Run g = run({"gen", "--d", "1", "--rho", "3", "--k", "2", "--seed", "0"});
  CHECK(g.code == exit_code::kOk);
  CHECK(g.out == slurp(kFixture));

  GenOptions o;
  o.rho = Resolution({4, 4});
  o.k = 4;
  o.seed = 9;
  const Instance a = generate_instance(o);
  CHECK(a.sites->size() == 4);
  for (const auto& w : a.kappa) CHECK(w.to_double() > 0.0);
  CHECK(io::instance_to_json(generate_instance(o)) == io::instance_to_json(a));

  o.anisotropy = std::make_pair(1.0, 1.0);
  const Instance iso = generate_instance(o);
  REQUIRE(iso.norms);
  for (std::size_t i = 0; i < 4; ++i) CHECK(iso.norms->matrix(i) == Eigen::MatrixXd::Identity(2, 2));

  o.anisotropy = std::make_pair(1.0, 10.0);
  const Instance an = generate_instance(o);
  CHECK(an.norms->lambda_min() >= 1.0 - 1e-12);
  CHECK(an.norms->lambda_max() <= 10.0 + 1e-12);

  o.anisotropy.reset();
  o.rho = Resolution({1});
  o.k = 3;
  CHECK_THROWS_AS(generate_instance(o), std::invalid_argument);

  CHECK(trial_sites(5, 2, 3, 2) == trial_sites(5, 2, 3, 2));
  CHECK(trial_sites(5, 2, 3, 2) != trial_sites(5, 3, 3, 2));
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == exit_code::kValidation);
  CHECK(run({"--help"}).code == exit_code::kOk);
  CHECK(run({"gen"}).code == exit_code::kValidation);
  CHECK(run({"gen", "--rho", "3", "--k", "20"}).code == exit_code::kValidation);
  CHECK(run({"gen", "--d", "2", "--rho", "3"}).code == exit_code::kValidation);
  CHECK(run({"solve", temp_path("missing.json").string()}).code == exit_code::kValidation);
  CHECK(run({"verify", "--rho", "8", "--k", "2", "--epsilon", "0.9", "--trials", "1"}).code == exit_code::kValidation);

  const Run ok = run({"verify", "--rho", "8", "--k", "2", "--epsilon", "0.5", "--trials", "50"});
  CHECK(ok.code == exit_code::kOk);
  CHECK(ok.err.empty());

  // a one-bit coreset is too coarse for the quality bound
  const Run bad = run({"verify", "--rho", "8", "--k", "2", "--epsilon", "0.5", "--trials", "5", "--tau", "1"});
  CHECK(bad.code == exit_code::kViolation);
  CHECK(bad.err.rfind(io::csv_header(), 0) == 0);
}

TEST_CASE("reports are reproducible") {
  const std::vector<std::string> args{"verify", "--rho", "5,5", "--k", "3", "--trials", "6", "--seed", "4"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == exit_code::kOk);
  CHECK(a.out == b.out);

  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  CHECK(run(threaded).out == a.out);

  const Run bench = run({"bench", "--rho", "5", "--k", "2", "--trials", "3", "--no-timing"});
  CHECK(bench.code == exit_code::kOk);
  CHECK(bench.out == run({"bench", "--rho", "5", "--k", "2", "--trials", "3", "--no-timing"}).out);

  const auto path = temp_path("report.csv");
  const Run to_file = run({"verify", "--rho", "5,5", "--k", "3", "--trials", "6", "--seed", "4", "--out", path.string()});
  CHECK(to_file.out == "verify: 6 trials, 0 violations\n");
  CHECK(slurp(path) == a.out);
  std::filesystem::remove(path);
}

TEST_CASE("coarsen then solve") {
  const Run direct = run({"solve", kFixture.string(), "--tau", "1"});
  CHECK(direct.code == exit_code::kOk);

  const auto path = temp_path("coarse.json");
  const Run c = run({"coarsen", kFixture.string(), "--tau", "1", "--out", path.string()});
  CHECK(c.code == exit_code::kOk);
  CHECK(line_value(c.out, "delta") == "0.01953125");

  const Run s = run({"solve", path.string()});
  CHECK(s.code == exit_code::kOk);
  CHECK(line_value(s.out, "resolution") == "1");
  CHECK(line_value(s.out, "objective") == line_value(direct.out, "objective"));
  CHECK(line_value(s.out, "identity_residual") == "0");
  const double extended = std::stod(line_value(s.out, "extended_cost"));
  CHECK(extended == doctest::Approx(std::stod(line_value(s.out, "objective")) + 0.01953125).epsilon(1e-14));

  // τ = ρ leaves the instance unchanged
  const Run same = run({"coarsen", kFixture.string(), "--tau", "3", "--out", path.string()});
  CHECK(line_value(same.out, "delta") == "0");
  const Run full = run({"solve", kFixture.string()});
  CHECK(line_value(run({"solve", path.string()}).out, "objective") == line_value(full.out, "objective"));
  CHECK(line_value(full.out, "objective") == "0.0599279701418709");
  std::filesystem::remove(path);
}

TEST_CASE("oracle subcommand") {
  const Run r = run({"oracle", "--rho", "4", "--k", "4"});
  CHECK(r.code == exit_code::kOk);
  CHECK(line_value(r.out, "opt_dp") == "0.0048828125");
  CHECK(line_value(r.out, "opt_closed") == "0.0048828125");
  CHECK(line_value(r.out, "sizes") == "4 4 4 4");

  const Run s = run({"oracle", "--rho", "8", "--k", "100", "--epsilon", "0.001", "--d", "3"});
  CHECK(line_value(s.out, "pencil_size") == "1e+16");
  CHECK(line_value(s.out, "advantage") == "10000");
}
