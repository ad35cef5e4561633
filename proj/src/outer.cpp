#include "iplr/outer.hpp"

#include "iplr/linalg.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace iplr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("SolverConfig: " + what);
}

}  // namespace

void SolverConfig::validate() const {
  require(mu0 > 0.0, "mu0 must be positive");
  require(sigma > 0.0 && sigma < 1.0, "sigma must lie in (0, 1)");
  require(eta1 > sigma && eta1 < 1.0, "eta1 must lie in (sigma, 1)");
  require(!eta2 || *eta2 > 0.0, "eta2 must be positive");
  require(epsilon > 0.0, "epsilon must be positive");
  require(initial_rank >= 1, "initial rank must be at least 1");
  require(delta_rank >= 1, "rank increment must be at least 1");
  require(max_rank_updates >= 0, "max rank updates must be non-negative");
  require(iteration_margin >= 0, "iteration margin must be non-negative");
  require(backtrack_factor > 0.0 && backtrack_factor < 1.0, "backtrack factor must lie in (0, 1)");
  require(backtrack_trials >= 1, "backtrack trials must be positive");
  require(inner.cg_tol > 0.0 && inner.cg_maxit >= 1, "cg tolerance and cap must be positive");
  require(inner.gs_max_sweeps >= 1 && inner.gs_escalated_sweeps >= 1, "sweep caps must be positive");
  require(inner.precond.tol > 0.0 && inner.precond.maxit >= 1, "preconditioner tolerances must be positive");
  require(inner.bb_maxit >= 1 && inner.bb_grad_cap > 0.0 && inner.bb_memory >= 1, "bb settings must be positive");
  require(inner.bb_min_step > 0.0 && inner.bb_max_step >= inner.bb_min_step, "bb step bounds invalid");
  require(inner.bb_armijo > 0.0 && inner.bb_armijo < 1.0, "bb armijo parameter must lie in (0, 1)");
  require(inner.bb_backtrack > 0.0 && inner.bb_backtrack < 1.0, "bb backtrack factor must lie in (0, 1)");
  require(inner.bb_max_backtracks >= 0, "bb backtracks must be non-negative");
}

const char* to_string(RankFlag flag) {
  switch (flag) {
    case RankFlag::Unchanged: return "unch";
    case RankFlag::Up: return "up";
    case RankFlag::Down: return "down";
  }
  return "?";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::IterationCap: return "iteration_cap";
    case Termination::InnerFailure: return "inner_failure";
  }
  return "?";
}

RankDecision rank_adapt(RankState& state, double rho, double eta1, const Matrix& U, const Vector& y,
                        double infeasibility, int max_updates) {
  if (!state.inhibited && rho > eta1) {
    if (state.flag == RankFlag::Up) {
      state.r -= state.delta;
      state.flag = RankFlag::Down;
      state.inhibited = true;
      return {state.stash_U.leftCols(state.r), state.stash_y, state.stash_infeasibility};
    }
    const Index n = U.rows();
    if (state.r + state.delta <= n && state.updates < max_updates) {
      state.stash_U = U;
      state.stash_y = y;
      state.stash_infeasibility = infeasibility;
      Matrix grown = Matrix::Zero(n, state.r + state.delta);
      grown.leftCols(U.cols()) = U;
      for (Index j = state.r; j < state.r + state.delta; ++j) grown(j, j) = 1.0;
      state.r += state.delta;
      ++state.updates;
      state.flag = RankFlag::Up;
      return {grown, y, infeasibility};
    }
  }
  state.flag = RankFlag::Unchanged;
  return {U, y, infeasibility};
}

BacktrackResult dual_backtrack(const ConstraintOperator& op, const Vector& y_prev, const Vector& y_bar,
                               double factor, int max_trials) {
  const Vector dy = y_bar - y_prev;
  BacktrackResult out;
  double alpha = 1.0;
  while (true) {
    const Vector y = alpha == 1.0 ? y_bar : Vector(y_prev + alpha * dy);
    ++out.trials;
    auto L = try_cholesky(Matrix(op.slack(y)));
    if (L) {
      out.alpha = alpha;
      out.dual = {y, std::move(L)};
      return out;
    }
    alpha *= factor;
    if (alpha < 1e-16 || out.trials >= max_trials) {
      throw std::runtime_error("dual backtracking failed: step fell to " + std::to_string(alpha) +
                               " without restoring positive definiteness");
    }
  }
}

double lambda_min_estimate(const Matrix& L, int steps) {
  const Index n = L.rows();
  if (n == 0) return 0.0;
  const auto lower = L.triangularView<Eigen::Lower>();
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double estimate = 0.0;
  for (int i = 0; i < steps; ++i) {
    Vector x = lower.solve(v);
    x = lower.transpose().solve(x);
    estimate = 1.0 / v.dot(x);
    v = x / x.norm();
  }
  return estimate;
}

int iteration_cap(const SolverConfig& cfg) {
  const double cuts = std::ceil(std::log(cfg.epsilon / cfg.mu0) / std::log(cfg.sigma));
  return std::max(1, static_cast<int>(cuts)) + 3 * cfg.max_rank_updates + cfg.iteration_margin;
}

SolveReport iplr_solve(const SdpProblem& problem, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const ConstraintOperator op(problem);
  const Index n = problem.n();

  SolveReport report;
  report.eta2 = cfg.eta2.value_or(std::sqrt(static_cast<double>(n)));
  report.iteration_cap = iteration_cap(cfg);

  Matrix U;
  if (cfg.U0) {
    require(cfg.U0->rows() == n && cfg.U0->cols() >= 1, "U0 must be n x r with r >= 1");
    U = *cfg.U0;
  } else {
    require(cfg.initial_rank <= n, "initial rank exceeds n");
    U = Matrix::Identity(n, cfg.initial_rank);
  }
  Vector y = cfg.y0.value_or(Vector::Zero(problem.m()));
  require(y.size() == problem.m(), "y0 must have length m");
  auto chol = try_cholesky(Matrix(op.slack(y)));
  if (!chol) {
    throw std::invalid_argument("iplr_solve: C - A^T y0 is not positive definite; supply a strictly "
                                "dual feasible y0");
  }

  RankState state;
  state.r = U.cols();
  state.delta = cfg.delta_rank;

  double reference = (op.apply_lowrank(U, cfg.mu0) - problem.b()).norm();
  double mu = cfg.sigma * cfg.mu0;
  int max_sweeps = cfg.inner.gs_max_sweeps;
  int consecutive_failures = 0;

  for (int k = 1;; ++k) {
    if (k > report.iteration_cap) {
      report.termination = Termination::IterationCap;
      report.message = "iteration cap of " + std::to_string(report.iteration_cap) + " reached";
      break;
    }
    const auto iter_start = Clock::now();

    InnerResult inner = cfg.inner.method == InnerMethod::GaussSeidel
                            ? gauss_seidel(op, U, y, mu, report.eta2, max_sweeps, cfg.inner)
                            : bb_minimize(op, U, y, mu, cfg.inner);
    consecutive_failures = inner.stats.failed ? consecutive_failures + 1 : 0;

    BacktrackResult bt = dual_backtrack(op, y, inner.y, cfg.backtrack_factor, cfg.backtrack_trials);
    U = std::move(inner.U);
    y = bt.dual.y;
    chol = std::move(bt.dual.chol);

    IterationRecord rec;
    rec.k = k;
    rec.mu = mu;
    rec.rank = U.cols();
    rec.max_sweeps = cfg.inner.method == InnerMethod::GaussSeidel ? max_sweeps : 0;
    rec.alpha = bt.alpha;
    rec.backtrack_trials = bt.trials;
    rec.inner = std::move(inner.stats);
    {
      const IterateContext ctx(op, U, y, mu);
      const Residuals res = residuals(ctx);
      rec.primal_infeasibility = res.F1.norm();
      rec.complementarity = res.F2.norm();
    }
    rec.lambda_min_S = lambda_min_estimate(*chol);
    rec.rho_reference = reference;

    std::optional<std::pair<Matrix, Vector>> accepted;
    if (cfg.on_iteration) accepted.emplace(U, y);
    auto publish = [&] {
      report.records.push_back(std::move(rec));
      if (accepted) cfg.on_iteration(report.records.back(), accepted->first, accepted->second);
    };

    auto finish = [&](Termination t, std::string message) {
      rec.seconds = seconds_since(iter_start);
      publish();
      report.termination = t;
      report.message = std::move(message);
    };

    if (consecutive_failures >= 2) {
      finish(Termination::InnerFailure, "inner solver failed twice in a row: " + rec.inner.failure);
      break;
    }
    if (mu < cfg.epsilon) {
      finish(Termination::Converged, "mu below epsilon");
      break;
    }

    rec.rho = reference < 1e-15 ? 0.0 : rec.primal_infeasibility / reference;
    if (cfg.rank_adaptation) {
      RankDecision next =
          rank_adapt(state, rec.rho, cfg.eta1, U, y, rec.primal_infeasibility, cfg.max_rank_updates);
      if (state.flag == RankFlag::Up && max_sweeps == cfg.inner.gs_max_sweeps) {
        max_sweeps = cfg.inner.gs_escalated_sweeps;
      }
      if (state.flag == RankFlag::Down) {
        chol = try_cholesky(Matrix(op.slack(next.y)));
        if (!chol) throw std::logic_error("iplr_solve: restored dual point lost positive definiteness");
      }
      U = std::move(next.U);
      y = std::move(next.y);
      reference = next.reference_infeasibility;
    } else {
      state.flag = RankFlag::Unchanged;
      reference = rec.primal_infeasibility;
    }
    rec.rank_flag = state.flag;
    rec.seconds = seconds_since(iter_start);
    publish();

    if (state.flag == RankFlag::Unchanged) mu *= cfg.sigma;
  }

  report.primal = {U, mu};
  report.dual = {y, chol};
  report.seconds = seconds_since(start);
  return report;
}

}  // namespace iplr
