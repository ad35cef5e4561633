#include "iplr/cli.hpp"

#include "iplr/io.hpp"
#include "iplr/matcomp.hpp"
#include "iplr/outer.hpp"
#include "iplr/random.hpp"
#include "iplr/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

namespace iplr {

namespace {

using nlohmann::json;

constexpr int kManifestSchemaVersion = 1;

std::string env_name(const std::string& flag) {
  std::string out = "IPLR_";
  for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

template <class T>
CLI::Option* opt(CLI::App* app, const std::string& flag, T& value, const std::string& help) {
  return app->add_option("--" + flag, value, help)->envname(env_name(flag));
}

CLI::Option* flag(CLI::App* app, const std::string& name, bool& value, const std::string& help) {
  return app->add_flag("--" + name, value, help)->envname(env_name(name));
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

struct GenerateArgs {
  Index nhat = 0;
  Index rank = 0;
  Index m = 0;
  std::uint64_t seed = 1;
  double noise = 0.0;
  double kappa = 0.0;
  double xi = 0.0;
  std::string out_dir = ".";
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  if (a.rank < 1 || a.rank > a.nhat) throw CLI::ValidationError("--rank", "must lie in [1, nhat]");
  if (a.noise < 0.0) throw CLI::ValidationError("--noise", "must be non-negative");
  if (a.xi < 0.0) throw CLI::ValidationError("--xi", "must be non-negative");
  const bool conditioned = a.kappa != 0.0;
  if (conditioned && a.kappa < 1.0) throw CLI::ValidationError("--kappa", "must be at least 1");

  const std::uint64_t truth_seed = a.seed;
  const std::uint64_t omega_seed = a.seed + 1;
  const std::uint64_t noise_seed = a.seed + 2;
  const std::uint64_t perturb_seed = a.seed + 3;

  GroundTruth truth = conditioned ? generate_conditioned(a.nhat, a.rank, a.kappa, truth_seed)
                                  : generate_random_lowrank(a.nhat, a.rank, truth_seed);
  if (a.xi > 0.0) truth = perturb_singular_values(truth, a.xi, perturb_seed);

  const Index m = a.m > 0 ? a.m : default_sample_count(a.nhat, a.rank);
  if (m > a.nhat * a.nhat) throw CLI::ValidationError("--m", "exceeds nhat^2");
  const auto omega = sample_omega(a.nhat, m, omega_seed);
  auto entries = observe(truth.B, omega);
  if (a.noise > 0.0) {
    Vector b(m);
    for (Index i = 0; i < m; ++i) b(i) = entries[static_cast<std::size_t>(i)].value;
    b = add_noise(b, a.noise, noise_seed);
    for (Index i = 0; i < m; ++i) entries[static_cast<std::size_t>(i)].value = b(i);
  }

  std::filesystem::create_directories(a.out_dir);
  const auto dir = std::filesystem::path(a.out_dir);
  write_dense_file((dir / "truth.csv").string(), truth.B);
  write_observed_file((dir / "observed.csv").string(), entries);

  json manifest = {
      {"schema_version", kManifestSchemaVersion},
      {"generator", truth.generator},
      {"rng", Rng::kAlgorithm},
      {"seed", a.seed},
      {"seeds", {{"truth", truth_seed}, {"omega", omega_seed}, {"noise", noise_seed}, {"perturb", perturb_seed}}},
      {"nhat", a.nhat},
      {"rank", a.rank},
      {"m", m},
      {"eta", a.noise},
      {"kappa", conditioned ? a.kappa : 1.0},
      {"xi", a.xi},
      {"epsilon_hint", std::max(1e-4, 0.1 * a.noise)},
      {"files", {{"truth", "truth.csv"}, {"observed", "observed.csv"}}},
  };
  write_json((dir / "manifest.json").string(), manifest);
  out << manifest.dump(2) << '\n';
  return kExitOk;
}

struct SolveArgs {
  std::string observed;
  Index nhat = 0;
  std::string report = "report.json";
  std::string factor = "U.csv";
  std::string emit_dense;
  std::string inner = "gs";
  std::string precond = "schur";
  Index rank = 1;
  Index delta_rank = 1;
  bool no_rank_adaptation = false;
  double mu0 = 1.0;
  double sigma = 0.5;
  double eta1 = 0.9;
  double eta2 = 0.0;
  double epsilon = 1e-4;
  double cg_tol = 1e-6;
  int cg_maxit = 100;
  int gs_sweeps = 5;
  int bb_maxit = 300;
  bool deterministic = false;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<ObservedEntry> entries;
  try {
    entries = read_observed_file(a.observed);
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  if (entries.empty()) {
    err << "error: " << a.observed << ": no observed entries\n";
    return kExitBadInput;
  }
  Index nhat = a.nhat;
  if (nhat == 0) {
    for (const auto& e : entries) nhat = std::max({nhat, e.s + 1, e.t + 1});
  }
  std::optional<SdpProblem> built;
  try {
    built.emplace(build_mc_problem(entries, nhat));
  } catch (const std::invalid_argument& e) {
    err << "error: " << a.observed << ": " << e.what() << '\n';
    return kExitBadInput;
  }

  const SdpProblem& problem = *built;

  SolverConfig cfg;
  cfg.mu0 = a.mu0;
  cfg.sigma = a.sigma;
  cfg.eta1 = a.eta1;
  if (a.eta2 > 0.0) cfg.eta2 = a.eta2;
  cfg.epsilon = a.epsilon;
  cfg.initial_rank = a.rank;
  cfg.delta_rank = a.delta_rank;
  cfg.rank_adaptation = !a.no_rank_adaptation;
  cfg.inner.method = a.inner == "bb" ? InnerMethod::BarzilaiBorwein : InnerMethod::GaussSeidel;
  cfg.inner.use_preconditioner = a.precond == "schur";
  cfg.inner.cg_tol = a.cg_tol;
  cfg.inner.cg_maxit = a.cg_maxit;
  cfg.inner.gs_max_sweeps = a.gs_sweeps;
  cfg.inner.gs_escalated_sweeps = std::max(a.gs_sweeps, 10);
  cfg.inner.bb_maxit = a.bb_maxit;
  cfg.deterministic = a.deterministic;

  SolveReport report;
  try {
    report = iplr_solve(problem, cfg);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: solve aborted: " << e.what() << '\n';
    return kExitAborted;
  }

  write_json(a.report, report_to_json(problem, cfg, report, !a.deterministic));
  write_dense_file(a.factor, report.primal.U);
  if (!a.emit_dense.empty()) write_dense_file(a.emit_dense, extract_recovered(report.primal, nhat));

  const auto& last = report.records.back();
  out << "termination: " << to_string(report.termination) << '\n'
      << "iterations: " << report.records.size() << '\n'
      << "rank: " << report.primal.rank() << '\n'
      << "mu: " << report.primal.mu << '\n'
      << "primal_infeasibility: " << last.primal_infeasibility << '\n';
  if (report.termination != Termination::Converged) err << "warning: " << report.message << '\n';
  return report.exit_code();
}

struct EvaluateArgs {
  std::string recovered;
  std::string truth;
  double peak = 255.0;
  std::string output;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  Matrix X, B;
  try {
    X = read_dense_file(a.recovered);
    B = read_dense_file(a.truth);
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  if (X.rows() != B.rows() || X.cols() != B.cols()) {
    err << "error: shape mismatch: recovered is " << X.rows() << " x " << X.cols() << ", truth is " << B.rows()
        << " x " << B.cols() << '\n';
    return kExitBadInput;
  }
  if (X.rows() != X.cols()) {
    err << "error: matrices must be square\n";
    return kExitBadInput;
  }
  if (X.hasNaN()) {
    err << "error: " << a.recovered << ": recovered matrix contains NA\n";
    return kExitBadInput;
  }
  // NA entries of the truth are left out of every metric.
  const auto known = (B.array() == B.array()).cast<double>();
  const Index count = static_cast<Index>(known.sum());
  const Matrix Xk = (known * X.array()).matrix();
  const Matrix Bk = B.array().isNaN().select(0.0, B.array()).matrix();

  json metrics;
  try {
    metrics = {
        {"relative_error", relative_error(Xk, Bk)},
        {"rmse", rmse(Xk, Bk)},
        {"psnr", psnr(Xk, Bk, a.peak)},
        {"rank_of_recovered", numerical_rank(X)},
        {"entries_compared", count},
    };
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  if (!a.output.empty()) write_json(a.output, metrics);
  out << metrics.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relaxed interior point solver for low-rank SDP and matrix completion", "iplr"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a completion instance: truth.csv, observed.csv, manifest.json");
  opt(g, "nhat", gen.nhat, "Side length of the square matrix")->required()->check(CLI::PositiveNumber);
  opt(g, "rank", gen.rank, "Rank of the ground truth")->required()->check(CLI::PositiveNumber);
  opt(g, "m", gen.m, "Number of observed entries (default: (0.01 nhat + 4) r (2 nhat - r))");
  opt(g, "seed", gen.seed, "Random seed");
  opt(g, "noise", gen.noise, "Standard deviation eta of additive Gaussian noise");
  opt(g, "kappa", gen.kappa, "Condition number; switches to equally spaced singular values");
  opt(g, "xi", gen.xi, "Perturb every singular value by xi N(0,1)");
  opt(g, "out-dir", gen.out_dir, "Output directory");

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Complete a matrix from observed entries");
  opt(s, "observed", sol.observed, "Observed entries CSV (s,t,value, 1-based)")->required();
  opt(s, "nhat", sol.nhat, "Side length (default: largest index in the file)");
  opt(s, "report", sol.report, "Report JSON path");
  opt(s, "factor", sol.factor, "CSV path for the final factor U");
  opt(s, "emit-dense", sol.emit_dense, "CSV path for the recovered nhat x nhat matrix");
  opt(s, "inner", sol.inner, "Inner solver")->check(CLI::IsMember({"gs", "bb"}));
  opt(s, "precond", sol.precond, "Dual system preconditioner")->check(CLI::IsMember({"none", "schur"}));
  opt(s, "rank", sol.rank, "Initial rank")->check(CLI::PositiveNumber);
  opt(s, "delta-rank", sol.delta_rank, "Rank increment")->check(CLI::PositiveNumber);
  flag(s, "no-rank-adaptation", sol.no_rank_adaptation, "Keep the initial rank fixed");
  opt(s, "mu0", sol.mu0, "Initial barrier parameter");
  opt(s, "sigma", sol.sigma, "Barrier reduction factor");
  opt(s, "eta1", sol.eta1, "Infeasibility ratio threshold for rank updates");
  opt(s, "eta2", sol.eta2, "Inner gradient tolerance factor (default sqrt(n))");
  opt(s, "epsilon", sol.epsilon, "Stop once mu < epsilon");
  opt(s, "cg-tol", sol.cg_tol, "Relative residual tolerance of the inner CG solves");
  opt(s, "cg-maxit", sol.cg_maxit, "Iteration cap of the inner CG solves");
  opt(s, "gs-sweeps", sol.gs_sweeps, "Gauss-Seidel sweep cap");
  opt(s, "bb-maxit", sol.bb_maxit, "Barzilai-Borwein iteration cap");
  flag(s, "deterministic", sol.deterministic, "Omit timings so repeated runs produce identical files");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Compare a recovered matrix with the ground truth");
  opt(e, "recovered", ev.recovered, "Recovered matrix CSV")->required();
  opt(e, "truth", ev.truth, "Ground-truth CSV (NA marks unknown entries)")->required();
  opt(e, "peak", ev.peak, "Peak value for PSNR")->check(CLI::PositiveNumber);
  opt(e, "output", ev.output, "Also write the metrics JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex, out, err);
    return kExitBadInput;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*s) return cmd_solve(sol, out, err);
    return cmd_evaluate(ev, out, err);
  } catch (const CLI::ValidationError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitAborted;
  }
}

}  // namespace iplr
