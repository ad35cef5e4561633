#pragma once

#include "iplr/jacobian.hpp"
#include "iplr/precond.hpp"

#include <string>
#include <vector>

namespace iplr {

enum class InnerMethod { GaussSeidel, BarzilaiBorwein };

struct InnerConfig {
  InnerMethod method = InnerMethod::GaussSeidel;

  // Gauss-Seidel
  int gs_max_sweeps = 5;
  int gs_escalated_sweeps = 10;
  double cg_tol = 1e-6;
  int cg_maxit = 100;
  bool use_preconditioner = true;
  InnerSolveConfig precond;

  // Barzilai-Borwein
  int bb_maxit = 300;
  // Stop when ||grad|| <= min(bb_grad_cap, mu).
  double bb_grad_cap = 1e-3;
  int bb_memory = 10;
  double bb_min_step = 1e-10;
  double bb_max_step = 1e10;
  double bb_initial_step = 1.0;
  double bb_armijo = 1e-4;
  double bb_backtrack = 0.5;
  int bb_max_backtracks = 30;
  bool bb_record_trace = false;
};

/// One accepted BB step: phi before and after, the nonmonotone reference
/// value, the accepted step length and the directional derivative g^T d.
struct BbTraceEntry {
  double phi_before = 0.0;
  double phi_after = 0.0;
  double reference = 0.0;
  double step = 0.0;
  double slope = 0.0;
};

struct InnerStats {
  int iterations = 0;
  int cg_primal_iterations = 0;
  int cg_dual_iterations = 0;
  int precond_inner_iterations = 0;
  int precond_warnings = 0;
  double grad_norm = 0.0;
  double phi = 0.0;
  bool converged = false;
  bool failed = false;
  std::string failure;
  std::vector<BbTraceEntry> trace;
};

struct InnerResult {
  Matrix U;
  Vector y;
  InnerStats stats;
};

/// Nonlinear Gauss-Seidel on phi_mu: alternate a Gauss-Newton step in U
/// (unpreconditioned CG) and in y (CG, optionally with DualPreconditioner),
/// up to max_sweeps sweeps or until ||grad phi|| <= eta2 mu.
InnerResult gauss_seidel(const ConstraintOperator& op, const Matrix& U0, const Vector& y0, double mu,
                         double eta2, int max_sweeps, const InnerConfig& cfg);

/// Barzilai-Borwein gradient descent on the stacked (vec U; y) with a
/// nonmonotone Armijo line search; stops when ||grad phi|| <= min(cap, mu).
InnerResult bb_minimize(const ConstraintOperator& op, const Matrix& U0, const Vector& y0, double mu,
                        const InnerConfig& cfg);

}  // namespace iplr
