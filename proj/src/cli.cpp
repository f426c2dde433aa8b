#include "rescore/cli.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "rescore/coreset.hpp"
#include "rescore/diagrams.hpp"
#include "rescore/io.hpp"
#include "rescore/oracle.hpp"
#include "rescore/random.hpp"
#include "rescore/solver.hpp"

namespace rescore {

namespace {

constexpr int kSiteBits = 16;

double gaussian(std::mt19937_64& eng) {
  // Box-Muller; 1 - u keeps the logarithm finite.
  const double u = 1.0 - uniform01(eng);
  const double v = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

NormFamily random_norms(const SeedStream& stream, std::size_t k, std::size_t d, double lo, double hi) {
  if (!(lo > 0.0 && lo <= hi)) throw std::invalid_argument("anisotropy range must satisfy 0 < lo <= hi");
  const auto dd = static_cast<Eigen::Index>(d);
  std::vector<Eigen::MatrixXd> mats;
  for (std::size_t i = 0; i < k; ++i) {
    auto eng = stream.derive(i).engine();
    if (lo == hi) {
      mats.push_back(lo * Eigen::MatrixXd::Identity(dd, dd));
      continue;
    }
    Eigen::MatrixXd g(dd, dd);
    for (Eigen::Index r = 0; r < dd; ++r) {
      for (Eigen::Index c = 0; c < dd; ++c) g(r, c) = gaussian(eng);
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::VectorXd lambda(dd);
    for (Eigen::Index t = 0; t < dd; ++t) lambda(t) = uniform(eng, lo, hi);
    Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
    mats.push_back(0.5 * (a + a.transpose()));
  }
  return NormFamily(std::move(mats));
}

}  // namespace

Instance generate_instance(const GenOptions& options) {
  const Resolution& rho = options.rho;
  if (rho.dim() == 0) throw std::invalid_argument("rho must have at least one axis");
  if (options.k < 1) throw std::invalid_argument("k must be positive");
  const std::uint64_t n = rho.size();
  const auto k = static_cast<std::size_t>(options.k);
  if (k > n) throw std::invalid_argument("k exceeds the number of grid points");
  const std::size_t d = rho.dim();
  const std::vector<double> coords = grid_coordinates(rho);
  const SeedStream root(options.seed);

  for (int attempt = 0; attempt < kGenMaxAttempts; ++attempt) {
    auto eng = root.derive("instance").derive(static_cast<std::uint64_t>(attempt)).engine();
    PowerDiagram diagram;
    for (std::size_t i = 0; i < k; ++i) {
      Point s(d);
      for (auto& x : s) x = uniform_dyadic(eng, kSiteBits);
      diagram.sites.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < k; ++i) diagram.sizes.push_back(uniform(eng, 0.0, 0.1));

    std::vector<std::int64_t> counts(k, 0);
    for (std::uint64_t j = 0; j < n; ++j) {
      ++counts[assign(diagram, std::span<const double>(coords.data() + j * d, d)).cell];
    }
    if (std::find(counts.begin(), counts.end(), 0) != counts.end()) continue;

    Instance inst;
    inst.k = options.k;
    inst.rho = rho;
    inst.epsilon = options.epsilon;
    const Dyadic nu = voxel_volume(rho);
    for (auto c : counts) inst.kappa.push_back(Dyadic(c, 0) * nu);
    inst.sites = diagram.sites;
    if (options.anisotropy) {
      inst.norms = random_norms(root.derive("norms"), k, d, options.anisotropy->first, options.anisotropy->second);
    }
    inst.validate();
    return inst;
  }
  throw std::runtime_error("no instance with nonempty cells after " + std::to_string(kGenMaxAttempts) + " attempts");
}

std::vector<Point> trial_sites(std::uint64_t seed, std::uint64_t trial, std::size_t k, std::size_t d) {
  auto eng = SeedStream(seed).derive("trial").derive(trial).derive("sites").engine();
  std::vector<Point> sites(k, Point(d));
  for (auto& s : sites) {
    for (auto& x : s) x = uniform_dyadic(eng, kSiteBits);
  }
  return sites;
}

namespace {

// Trials fan out over a fixed pool; every slot is written by exactly one
// worker, so the output order only depends on the trial index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < count; t = next++) {
        try {
          body(t);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Arithmetic parse_arithmetic(const std::string& name) {
  if (name == "auto") return Arithmetic::kAuto;
  if (name == "exact") return Arithmetic::kExact;
  if (name == "float") return Arithmetic::kFloating;
  throw std::invalid_argument("unknown arithmetic '" + name + "'");
}

std::optional<Resolution> optional_resolution(const std::vector<int>& exps) {
  if (exps.empty()) return std::nullopt;
  return Resolution(exps);
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

// Shared sweep configuration of `verify` and `bench`.
struct SweepArgs {
  std::string instance_path;
  std::vector<int> rho;
  int k = 2;
  double epsilon = 0.5;
  std::vector<int> tau;
  std::uint64_t trials = 10;
  std::uint64_t seed = 0;
  std::vector<double> anisotropy;
  int threads = 1;
  std::string out;
  std::string format = "csv";
  std::string arithmetic = "auto";
};

void add_sweep_flags(CLI::App* cmd, SweepArgs& a) {
  cmd->add_option("--instance", a.instance_path, "Instance file; trials then only vary the sites");
  cmd->add_option("--rho", a.rho, "Grid exponents, comma separated")->delimiter(',');
  cmd->add_option("--k", a.k, "Number of clusters");
  cmd->add_option("--epsilon", a.epsilon, "Coreset accuracy in (0, 1/2]");
  cmd->add_option("--tau", a.tau, "Override the coarse exponents")->delimiter(',');
  cmd->add_option("--trials", a.trials, "Number of trials");
  cmd->add_option("--seed", a.seed, "Root seed");
  cmd->add_option("--anisotropy", a.anisotropy, "Eigenvalue range lo,hi of random norms")->delimiter(',')->expected(2);
  cmd->add_option("--threads", a.threads, "Worker threads");
  cmd->add_option("--out", a.out, "Write the CSV report here instead of stdout");
  cmd->add_option("--format", a.format, "Report format")->check(CLI::IsMember({"csv"}));
  cmd->add_option("--arithmetic", a.arithmetic, "auto, exact or float")->check(CLI::IsMember({"auto", "exact", "float"}));
}

struct TrialSetup {
  std::string id;
  Instance instance;
  CoresetPlan plan;
  std::vector<Point> sites;
};

std::optional<std::pair<double, double>> anisotropy_of(const SweepArgs& a) {
  if (a.anisotropy.empty()) return std::nullopt;
  return std::make_pair(a.anisotropy[0], a.anisotropy[1]);
}

// Instance for trial t: the file when one was given, otherwise a generated
// instance on the trial's own stream.
TrialSetup setup_trial(const SweepArgs& a, const std::optional<io::InstanceFile>& file, std::uint64_t t) {
  TrialSetup s;
  if (file) {
    s.instance = file->instance;
    s.id = stem_of(a.instance_path);
  } else {
    GenOptions gen;
    gen.rho = Resolution(a.rho);
    gen.k = a.k;
    gen.seed = SeedStream(a.seed).derive("trial").derive(t).seed();
    gen.anisotropy = anisotropy_of(a);
    gen.epsilon = a.epsilon;
    s.instance = generate_instance(gen);
    s.id = "gen-" + io::resolution_label(gen.rho) + "-k" + std::to_string(a.k) + "-s" + std::to_string(a.seed);
  }
  s.instance.epsilon = a.epsilon;
  s.sites = trial_sites(a.seed, t, static_cast<std::size_t>(s.instance.k), s.instance.dim());
  const auto tau = optional_resolution(a.tau);
  if (s.instance.isotropic()) {
    s.plan = make_plan(std::max(s.instance.k, 2), a.epsilon, s.instance.rho, tau);
  } else {
    s.plan = make_plan(std::max(s.instance.k, 2), a.epsilon / 3.0, s.instance.rho, tau);
  }
  return s;
}

std::optional<io::InstanceFile> load_sweep_instance(const SweepArgs& a) {
  if (!a.instance_path.empty()) {
    auto file = io::read_instance(a.instance_path);
    file.instance.epsilon = a.epsilon;
    file.instance.validate();
    return file;
  }
  if (a.rho.empty()) throw std::invalid_argument("either --instance or --rho is required");
  if (!a.anisotropy.empty() && a.anisotropy.size() != 2) throw std::invalid_argument("--anisotropy takes lo,hi");
  return std::nullopt;
}

io::ReportRow base_row(const TrialSetup& s, std::uint64_t t, std::uint64_t seed) {
  io::ReportRow row;
  row.instance_id = s.id;
  row.trial = t;
  row.seed = seed;
  row.k = s.instance.k;
  row.epsilon = s.instance.epsilon;
  row.delta = s.plan.delta;
  return row;
}

// Two rows per trial: the full solve and the coarse solve with its extension.
std::pair<io::ReportRow, io::ReportRow> verify_trial(const SweepArgs& a, const TrialSetup& s, std::uint64_t t,
                                                     const SolveOptions& options) {
  io::ReportRow full = base_row(s, t, a.seed);
  io::ReportRow coarse = base_row(s, t, a.seed);
  full.level = "full";
  full.resolution = io::resolution_label(s.plan.fine);
  coarse.level = "coarse";
  coarse.resolution = io::resolution_label(s.plan.coarse);

  if (s.instance.isotropic()) {
    const TrialCertificate cert = certify_trial(s.instance, s.plan, s.sites, options);

    // Property (a) on an arbitrary coarse clustering, not only the optimum.
    auto eng = SeedStream(a.seed).derive("trial").derive(t).derive("labels").engine();
    std::vector<std::uint32_t> labels(s.plan.coarse.size());
    for (auto& l : labels) l = static_cast<std::uint32_t>(uniform_int(eng, 0, s.instance.k - 1));
    const PropertyAReport pa =
        verify_property_a(Clustering::from_labels(static_cast<std::size_t>(s.instance.k), labels), s.sites, s.instance,
                          s.plan);
    const bool size_ok = a.tau.empty() ? size_report(s.plan).bound_holds : true;
    const double sandwich = (1.0 + s.plan.epsilon) / (1.0 - s.plan.epsilon);

    full.objective = cert.full_cost;
    full.bound = (1.0 + s.plan.epsilon) * cert.full_cost;
    full.margin = cert.margin_b;
    full.extended_cost = cert.extended_cost;
    full.quality_ratio = cert.quality_ratio;
    full.fractional = cert.fractional_full;
    full.duality_gap = cert.duality_gap;
    full.compat_violation = cert.compat_violation;
    full.pivots = cert.pivots_full;
    full.ok = cert.margin_b >= -kMarginTolerance && cert.duality_gap <= kGapTolerance && cert.compatible &&
              cert.fractional_ok;

    coarse.objective = cert.coarse_cost;
    coarse.bound = sandwich;
    coarse.margin = cert.sandwich_margin;
    coarse.extended_cost = cert.extended_cost;
    coarse.quality_ratio = cert.quality_ratio;
    coarse.fractional = cert.fractional_coarse;
    coarse.duality_gap = cert.duality_gap;
    coarse.compat_violation = cert.compat_violation;
    coarse.pivots = cert.pivots_coarse;
    coarse.ok = cert.ok() && pa.holds && size_ok;
  } else {
    const TransferReport tr = check_transfer(s.instance, s.sites, s.instance.epsilon, options);
    full.objective = tr.full_cost;
    full.bound = tr.bound;
    full.extended_cost = tr.extended_cost;
    full.quality_ratio = tr.ratio;
    full.margin = tr.bound * tr.full_cost - tr.extended_cost;
    coarse = full;
    coarse.level = "coarse";
    coarse.resolution = io::resolution_label(tr.plan.coarse);
    coarse.delta = tr.plan.delta;
    full.ok = true;
    coarse.ok = tr.holds;
  }
  return {full, coarse};
}

std::pair<io::ReportRow, io::ReportRow> bench_trial(const SweepArgs& a, const TrialSetup& s, std::uint64_t t,
                                                    const SolveOptions& options, bool timing) {
  io::ReportRow full = base_row(s, t, a.seed);
  io::ReportRow coarse = base_row(s, t, a.seed);
  full.level = "full";
  full.resolution = io::resolution_label(s.plan.fine);
  coarse.level = "coarse";
  coarse.resolution = io::resolution_label(s.plan.coarse);

  Instance coarse_instance = s.instance;
  coarse_instance.norms.reset();
  const NormFamily* norms = s.instance.norms ? &*s.instance.norms : nullptr;

  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult fr = solve_assignment(s.instance, s.plan.fine, s.sites, options);
  const double full_ms = elapsed_ms(t0);
  const auto t1 = std::chrono::steady_clock::now();
  const SolveResult cr = solve_assignment(coarse_instance, s.plan.coarse, s.sites, options);
  const double coarse_ms = elapsed_ms(t1);

  const double extended = cost_sites(extend_to_fine(cr.clustering, s.plan), s.sites, s.plan.fine, norms);
  const double ratio = fr.objective > 0.0 ? extended / fr.objective : 1.0;
  const double eps = s.instance.epsilon;
  const double bound = norms ? transfer_bound(1.0, eps, *norms) : (1.0 + eps) / (1.0 - eps);

  for (auto* row : {&full, &coarse}) {
    row->extended_cost = extended;
    row->quality_ratio = ratio;
    row->bound = bound;
    row->margin = bound * fr.objective - extended;
    row->ok = row->margin >= -kMarginTolerance;
  }
  full.objective = fr.objective;
  full.fractional = fr.fractional_count;
  full.duality_gap = fr.duality_gap();
  full.pivots = fr.pivots;
  coarse.objective = cr.objective;
  coarse.fractional = cr.fractional_count;
  coarse.duality_gap = cr.duality_gap();
  coarse.pivots = cr.pivots;
  if (timing) {
    full.wall_ms = full_ms;
    coarse.wall_ms = coarse_ms;
    const double speedup = coarse_ms > 0.0 ? full_ms / coarse_ms : 0.0;
    full.speedup = speedup;
    coarse.speedup = speedup;
  }
  return {full, coarse};
}

int run_sweep(const SweepArgs& a, bool bench, bool timing, std::ostream& out, std::ostream& err) {
  if (a.trials == 0) throw std::invalid_argument("--trials must be positive");
  const auto file = load_sweep_instance(a);
  SolveOptions options;
  options.arithmetic = parse_arithmetic(a.arithmetic);

  std::vector<std::pair<io::ReportRow, io::ReportRow>> rows(a.trials);
  parallel_for(a.trials, a.threads, [&](std::size_t t) {
    const TrialSetup s = setup_trial(a, file, t);
    rows[t] = bench ? bench_trial(a, s, t, options, timing) : verify_trial(a, s, t, options);
  });

  std::ofstream file_out;
  std::ostream* report = &out;
  if (!a.out.empty()) {
    file_out.open(a.out);
    if (!file_out) throw std::runtime_error("cannot write " + a.out);
    report = &file_out;
  }
  *report << io::csv_header() << '\n';
  std::size_t violations = 0;
  for (const auto& [full, coarse] : rows) {
    for (const auto* row : {&full, &coarse}) {
      *report << io::to_csv(*row) << '\n';
      if (!row->ok) {
        if (violations == 0) err << io::csv_header() << '\n';
        err << io::to_csv(*row) << '\n';
        ++violations;
      }
    }
  }
  if (!a.out.empty()) {
    out << (bench ? "bench" : "verify") << ": " << a.trials << " trials, " << violations << " violations\n";
  }
  return violations == 0 ? exit_code::kOk : exit_code::kViolation;
}

void write_assignments(std::ostream& out, const Clustering& c) {
  out << "point,cluster,fraction\n";
  for (std::uint64_t j = 0; j < c.points(); ++j) {
    for (const auto& e : c.column(j)) out << j << ',' << e.cluster << ',' << io::format_double(e.fraction) << '\n';
  }
}

struct SolveArgs {
  std::string path;
  std::vector<int> tau;
  std::uint64_t seed = 0;
  std::string arithmetic = "auto";
  std::string format = "text";
  bool assignments = false;
};

int run_solve(const SolveArgs& a, std::ostream& out) {
  io::InstanceFile file = io::read_instance(a.path);
  const Instance& inst = file.instance;
  std::optional<CoresetPlan> plan = file.plan;
  if (!a.tau.empty()) plan = make_plan(std::max(inst.k, 2), inst.epsilon, inst.rho, Resolution(a.tau));

  const std::vector<Point> sites =
      inst.sites ? *inst.sites : trial_sites(a.seed, 0, static_cast<std::size_t>(inst.k), inst.dim());
  SolveOptions options;
  options.arithmetic = parse_arithmetic(a.arithmetic);
  const Resolution at = plan ? plan->coarse : inst.rho;
  if (plan && !inst.isotropic() && !(plan->coarse == plan->fine)) {
    throw std::invalid_argument("coarse solves need an isotropic instance");
  }
  const SolveResult r = solve_assignment(inst, at, sites, options);
  const NormFamily* norms = inst.norms ? &*inst.norms : nullptr;

  double extended = r.objective;
  if (plan) extended = cost_sites(extend_to_fine(r.clustering, *plan), sites, plan->fine, norms);
  const CompatibilityReport compat = check_compatibility(r.clustering, from_duals(sites, r.duals), at, true);

  if (a.format == "csv") {
    io::ReportRow row;
    row.instance_id = stem_of(a.path);
    row.seed = a.seed;
    row.level = plan ? "coarse" : "full";
    row.resolution = io::resolution_label(at);
    row.k = inst.k;
    row.epsilon = inst.epsilon;
    row.objective = r.objective;
    row.delta = plan ? plan->delta : 0.0;
    row.extended_cost = extended;
    row.fractional = r.fractional_count;
    row.duality_gap = r.duality_gap();
    row.compat_violation = compat.worst_violation;
    row.pivots = r.pivots;
    row.ok = compat.compatible;
    out << io::csv_header() << '\n' << io::to_csv(row) << '\n';
  } else {
    out << "instance: " << a.path << '\n';
    out << "resolution: " << io::resolution_label(at) << '\n';
    out << "points: " << at.size() << '\n';
    out << "objective: " << io::format_double(r.objective) << '\n';
    out << "dual_objective: " << io::format_double(r.dual_objective) << '\n';
    out << "duality_gap: " << io::format_double(r.duality_gap()) << '\n';
    if (plan) {
      out << "delta: " << io::format_double(plan->delta) << '\n';
      out << "extended_cost: " << io::format_double(extended) << '\n';
      out << "identity_residual: " << io::format_double(std::abs(extended - r.objective - plan->delta)) << '\n';
    }
    out << "fractional: " << r.fractional_count << '\n';
    out << "pivots: " << r.pivots << '\n';
    out << "arithmetic: " << (r.exact ? "exact" : "float") << '\n';
    out << "compatible: " << (compat.compatible ? "yes" : "no") << '\n';
    out << "compat_violation: " << io::format_double(compat.worst_violation) << '\n';
    const auto weights = cluster_weights(r.clustering, at);
    const auto costs = cluster_costs(r.clustering, sites, at, norms);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      out << "cluster " << i << ": weight " << io::format_double(weights[i]) << " cost "
          << io::format_double(costs[i]) << " dual " << io::format_double(r.duals[i]) << '\n';
    }
  }
  if (a.assignments) write_assignments(out, r.clustering);
  return exit_code::kOk;
}

struct CoarsenArgs {
  std::string path;
  std::vector<int> tau;
  std::optional<double> epsilon;
  std::string out;
};

int run_coarsen(const CoarsenArgs& a, std::ostream& out) {
  io::InstanceFile file = io::read_instance(a.path);
  Instance& inst = file.instance;
  if (a.epsilon) {
    inst.epsilon = *a.epsilon;
    inst.validate();
  }
  const CoresetPlan plan = make_plan(std::max(inst.k, 2), inst.epsilon, inst.rho, optional_resolution(a.tau));
  const auto j = io::instance_to_json(inst, plan);
  if (a.out.empty()) {
    io::write_json(j, out);
  } else {
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot write " + a.out);
    io::write_json(j, f);
    out << "tau: " << io::resolution_label(plan.coarse) << '\n' << "delta: " << io::format_double(plan.delta) << '\n';
  }
  return exit_code::kOk;
}

struct GenArgs {
  std::vector<int> rho;
  int k = 2;
  std::uint64_t seed = 0;
  std::vector<double> anisotropy;
  double epsilon = 0.5;
  std::optional<std::size_t> d;
  std::string out;
};

int run_gen(const GenArgs& a, std::ostream& out) {
  if (a.d && *a.d != a.rho.size()) throw std::invalid_argument("--d does not match the length of --rho");
  GenOptions gen;
  gen.rho = Resolution(a.rho);
  gen.k = a.k;
  gen.seed = a.seed;
  gen.epsilon = a.epsilon;
  if (!a.anisotropy.empty()) {
    if (a.anisotropy.size() != 2) throw std::invalid_argument("--anisotropy takes lo,hi");
    gen.anisotropy = std::make_pair(a.anisotropy[0], a.anisotropy[1]);
  }
  const auto j = io::instance_to_json(generate_instance(gen));
  if (a.out.empty()) {
    io::write_json(j, out);
  } else {
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot write " + a.out);
    io::write_json(j, f);
  }
  return exit_code::kOk;
}

struct OracleArgs {
  int rho = 4;
  std::uint64_t k = 2;
  std::optional<double> epsilon;
  std::size_t d = 1;
};

int run_oracle(const OracleArgs& a, std::ostream& out) {
  const oracle::Opt1DResult r = oracle::opt1d_dp(a.rho, a.k);
  out << "rho: " << a.rho << '\n' << "k: " << a.k << '\n';
  out << "opt_dp: " << io::format_double(r.cost) << '\n';
  if (std::has_single_bit(a.k) && std::bit_width(a.k) - 1 <= static_cast<unsigned>(a.rho)) {
    out << "opt_closed: " << io::format_double(oracle::opt1d_closed(a.rho, static_cast<int>(std::bit_width(a.k) - 1)))
        << '\n';
  }
  out << "lower_bound: " << io::format_double(oracle::lower_bound_1d(a.rho, a.k)) << '\n';
  out << "sizes:";
  for (auto s : r.sizes) out << ' ' << s;
  out << "\ncentroids:";
  for (auto c : r.centroids) out << ' ' << io::format_double(c);
  out << '\n';
  if (a.epsilon) {
    const SizeReport s = size_report(static_cast<int>(a.k), *a.epsilon, a.d);
    out << "tau_star: " << tau_star(static_cast<int>(a.k), *a.epsilon) << '\n';
    out << "axis_points: " << s.axis_points.front() << '\n';
    out << "axis_bound: " << io::format_double(s.axis_bound) << '\n';
    out << "pencil_size: " << io::format_double(s.pencil_size) << '\n';
    out << "resolution_size: " << io::format_double(s.resolution_size) << '\n';
    out << "advantage: " << io::format_double(s.advantage) << '\n';
  }
  return exit_code::kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resolution coresets for weight-constrained clustering", "rescore"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random power-diagram instance");
  gen_cmd->add_option("--d", gen.d, "Dimension (checked against --rho)");
  gen_cmd->add_option("--rho", gen.rho, "Grid exponents, comma separated")->required()->delimiter(',');
  gen_cmd->add_option("--k", gen.k, "Number of clusters");
  gen_cmd->add_option("--seed", gen.seed, "Root seed");
  gen_cmd->add_option("--anisotropy", gen.anisotropy, "Eigenvalue range lo,hi")->delimiter(',')->expected(2);
  gen_cmd->add_option("--epsilon", gen.epsilon, "Coreset accuracy stored in the file");
  gen_cmd->add_option("--out", gen.out, "Output path (default stdout)");

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the weight-constrained assignment LP");
  solve_cmd->add_option("instance", solve_args.path, "Instance file")->required();
  solve_cmd->add_option("--tau", solve_args.tau, "Solve on X(tau) and extend")->delimiter(',');
  solve_cmd->add_option("--seed", solve_args.seed, "Seed for sites when the file has none");
  solve_cmd->add_option("--arithmetic", solve_args.arithmetic, "auto, exact or float")
      ->check(CLI::IsMember({"auto", "exact", "float"}));
  solve_cmd->add_option("--format", solve_args.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  solve_cmd->add_flag("--assignments", solve_args.assignments, "Print every nonzero assignment fraction");

  CoarsenArgs coarsen_args;
  auto* coarsen_cmd = app.add_subcommand("coarsen", "Attach a coarse resolution and offset to an instance");
  coarsen_cmd->add_option("instance", coarsen_args.path, "Instance file")->required();
  coarsen_cmd->add_option("--tau", coarsen_args.tau, "Override the coarse exponents")->delimiter(',');
  coarsen_cmd->add_option("--epsilon", coarsen_args.epsilon, "Coreset accuracy");
  coarsen_cmd->add_option("--out", coarsen_args.out, "Output path (default stdout)");

  SweepArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Check the coreset properties over random trials");
  add_sweep_flags(verify_cmd, verify_args);

  SweepArgs bench_args;
  bool no_timing = false;
  auto* bench_cmd = app.add_subcommand("bench", "Time full against coarse solves");
  add_sweep_flags(bench_cmd, bench_args);
  bench_cmd->add_flag("--no-timing", no_timing, "Write zero wall times for reproducible output");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact 1D optimum, lower bound and size bounds");
  oracle_cmd->add_option("--rho", oracle_args.rho, "Grid exponent")->required();
  oracle_cmd->add_option("--k", oracle_args.k, "Number of clusters");
  oracle_cmd->add_option("--epsilon", oracle_args.epsilon, "Also report coreset sizes for this accuracy");
  oracle_cmd->add_option("--d", oracle_args.d, "Dimension for the size report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kValidation;
  }

  try {
    if (*gen_cmd) return run_gen(gen, out);
    if (*solve_cmd) return run_solve(solve_args, out);
    if (*coarsen_cmd) return run_coarsen(coarsen_args, out);
    if (*verify_cmd) return run_sweep(verify_args, false, false, out, err);
    if (*bench_cmd) return run_sweep(bench_args, true, !no_timing, out, err);
    if (*oracle_cmd) return run_oracle(oracle_args, out);
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return exit_code::kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kError;
  }
  return exit_code::kError;
}

}  // namespace rescore
