#pragma once

#include "iplr/inner.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace iplr {

struct IterationRecord;

struct SolverConfig {
  double mu0 = 1.0;
  double sigma = 0.5;
  double eta1 = 0.9;
  // Defaults to sqrt(n).
  std::optional<double> eta2;
  double epsilon = 1e-4;

  Index initial_rank = 1;
  Index delta_rank = 1;
  bool rank_adaptation = true;
  int max_rank_updates = 10;
  int iteration_margin = 10;

  InnerConfig inner;

  double backtrack_factor = 0.5;
  int backtrack_trials = 60;

  // Starting point; y0 = 0 and U0 = first r columns of I when absent.
  std::optional<Vector> y0;
  std::optional<Matrix> U0;

  bool deterministic = false;
  std::uint64_t seed = 0;

  // Called once per outer iteration with its record and the accepted (U, y),
  // i.e. after dual backtracking and before any rank change.
  std::function<void(const IterationRecord&, const Matrix&, const Vector&)> on_iteration;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

enum class RankFlag { Unchanged, Up, Down };

const char* to_string(RankFlag flag);

struct RankState {
  Index r = 1;
  Index delta = 1;
  RankFlag flag = RankFlag::Unchanged;
  bool inhibited = false;
  int updates = 0;
  // Iterate stashed on the way up, restored on the way down.
  Matrix stash_U;
  Vector stash_y;
  double stash_infeasibility = 0.0;
};

struct RankDecision {
  Matrix U;
  Vector y;
  // Infeasibility the next ratio is measured against.
  double reference_infeasibility = 0.0;
};

/// One step of the rank state machine. rho > eta1 moves unch -> up (append
/// delta canonical columns, stash (U, y)) and up -> down (restore the stash
/// at the old rank, inhibit further updates). Anything else is unch.
/// An up is skipped when it would exceed n columns or the update budget.
RankDecision rank_adapt(RankState& state, double rho, double eta1, const Matrix& U, const Vector& y,
                        double infeasibility, int max_updates);

struct BacktrackResult {
  double alpha = 1.0;
  int trials = 0;
  DualState dual;
};

/// Largest alpha in {1, f, f^2, ...} with C - A^T (y_prev + alpha (y_bar - y_prev))
/// positive definite. Throws std::runtime_error if alpha drops below 1e-16
/// or the trial budget runs out.
BacktrackResult dual_backtrack(const ConstraintOperator& op, const Vector& y_prev, const Vector& y_bar,
                               double factor = 0.5, int max_trials = 60);

/// Smallest eigenvalue of L L^T by a few steps of inverse iteration.
double lambda_min_estimate(const Matrix& L, int steps = 5);

struct IterationRecord {
  int k = 0;
  double mu = 0.0;
  Index rank = 0;
  double primal_infeasibility = 0.0;
  double complementarity = 0.0;
  double lambda_min_S = 0.0;
  double alpha = 1.0;
  int backtrack_trials = 0;
  double rho = 0.0;
  double rho_reference = 0.0;
  RankFlag rank_flag = RankFlag::Unchanged;
  int max_sweeps = 0;
  InnerStats inner;
  double seconds = 0.0;
};

enum class Termination { Converged, IterationCap, InnerFailure };

const char* to_string(Termination t);

struct SolveReport {
  std::vector<IterationRecord> records;
  LowRankPrimal primal;
  DualState dual;
  Termination termination = Termination::Converged;
  std::string message;
  int iteration_cap = 0;
  double eta2 = 0.0;
  double seconds = 0.0;

  int exit_code() const { return termination == Termination::Converged ? 0 : 2; }
};

/// Outer iteration cap: ceil(log(eps / mu0) / log(sigma)) + 3 max_rank_updates + margin.
int iteration_cap(const SolverConfig& cfg);

/// Relaxed interior point loop for low-rank SDP.
///
/// Each iteration minimizes phi_mu in (U, y) with the configured inner
/// method, backtracks y so that C - A^T y stays positive definite, stops once
/// mu < epsilon, then runs the rank state machine on the infeasibility ratio
/// and reduces mu only when the rank was left unchanged. The first inner
/// solve runs at sigma mu0.
SolveReport iplr_solve(const SdpProblem& problem, const SolverConfig& cfg);

}  // namespace iplr
