#include "iplr/report.hpp"

namespace iplr {

using nlohmann::json;

const char* to_string(InnerMethod method) {
  return method == InnerMethod::GaussSeidel ? "gs" : "bb";
}

json config_to_json(const SolverConfig& cfg, double eta2) {
  const InnerConfig& in = cfg.inner;
  return {
      {"mu0", cfg.mu0},
      {"sigma", cfg.sigma},
      {"eta1", cfg.eta1},
      {"eta2", eta2},
      {"epsilon", cfg.epsilon},
      {"initial_rank", cfg.U0 ? cfg.U0->cols() : cfg.initial_rank},
      {"delta_rank", cfg.delta_rank},
      {"rank_adaptation", cfg.rank_adaptation},
      {"max_rank_updates", cfg.max_rank_updates},
      {"iteration_margin", cfg.iteration_margin},
      {"backtrack_factor", cfg.backtrack_factor},
      {"backtrack_trials", cfg.backtrack_trials},
      {"deterministic", cfg.deterministic},
      {"seed", cfg.seed},
      {"inner",
       {{"method", to_string(in.method)},
        {"gs_max_sweeps", in.gs_max_sweeps},
        {"gs_escalated_sweeps", in.gs_escalated_sweeps},
        {"cg_tol", in.cg_tol},
        {"cg_maxit", in.cg_maxit},
        {"precond", in.use_preconditioner ? "schur" : "none"},
        {"precond_tol", in.precond.tol},
        {"precond_maxit", in.precond.maxit},
        {"bb_maxit", in.bb_maxit},
        {"bb_grad_cap", in.bb_grad_cap},
        {"bb_memory", in.bb_memory},
        {"bb_min_step", in.bb_min_step},
        {"bb_max_step", in.bb_max_step},
        {"bb_armijo", in.bb_armijo},
        {"bb_backtrack", in.bb_backtrack},
        {"bb_max_backtracks", in.bb_max_backtracks}}},
  };
}

json report_to_json(const SdpProblem& problem, const SolverConfig& cfg, const SolveReport& report,
                    bool include_timings) {
  json iterations = json::array();
  for (const auto& rec : report.records) {
    json inner = {
        {"iterations", rec.inner.iterations},
        {"max_sweeps", rec.max_sweeps},
        {"cg_primal_iterations", rec.inner.cg_primal_iterations},
        {"cg_dual_iterations", rec.inner.cg_dual_iterations},
        {"precond_inner_iterations", rec.inner.precond_inner_iterations},
        {"precond_warnings", rec.inner.precond_warnings},
        {"grad_norm", rec.inner.grad_norm},
        {"phi", rec.inner.phi},
        {"converged", rec.inner.converged},
        {"failed", rec.inner.failed},
        {"failure", rec.inner.failure},
    };
    json item = {
        {"k", rec.k},
        {"mu", rec.mu},
        {"rank", rec.rank},
        {"primal_infeasibility", rec.primal_infeasibility},
        {"complementarity", rec.complementarity},
        {"lambda_min_S", rec.lambda_min_S},
        {"lambda_min_S_is_estimate", true},
        {"alpha", rec.alpha},
        {"backtrack_trials", rec.backtrack_trials},
        {"rho", rec.rho},
        {"rho_reference", rec.rho_reference},
        {"rank_flag", to_string(rec.rank_flag)},
        {"inner", std::move(inner)},
    };
    if (include_timings) item["seconds"] = rec.seconds;
    iterations.push_back(std::move(item));
  }

  json problem_json = {{"n", problem.n()}, {"m", problem.m()}};
  if (problem.is_completion()) problem_json["nhat"] = problem.nhat();

  json final_json = {{"rank", report.primal.rank()}, {"mu", report.primal.mu}};
  if (!report.records.empty()) {
    final_json["primal_infeasibility"] = report.records.back().primal_infeasibility;
    final_json["complementarity"] = report.records.back().complementarity;
  }

  json out = {
      {"schema_version", kReportSchemaVersion},
      {"problem", std::move(problem_json)},
      {"config", config_to_json(cfg, report.eta2)},
      {"termination", to_string(report.termination)},
      {"exit_code", report.exit_code()},
      {"message", report.message},
      {"iteration_cap", report.iteration_cap},
      {"iterations", std::move(iterations)},
      {"final", std::move(final_json)},
  };
  if (include_timings) out["seconds"] = report.seconds;
  return out;
}

}  // namespace iplr
