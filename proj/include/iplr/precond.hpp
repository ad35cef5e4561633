#pragma once

#include "iplr/krylov.hpp"
#include "iplr/linop.hpp"

#include <Eigen/Cholesky>

#include <vector>

namespace iplr {

struct InnerSolveConfig {
  double tol = 1e-8;
  int maxit = 100;
};

struct PreconditionerSolve {
  Vector u;
  KrylovStats stats;
  // Inner PCG stopped before reaching its tolerance.
  bool warning = false;
};

/// P = mu A A^T + Z Z^T with Z = A (I_n (x) U), for the dual normal matrix
/// J22^T J22 = A (I (x) X^2) A^T.
///
/// P^{-1} d goes through the Schur complement E = I + Z^T K Z, K = (mu A A^T)^{-1}:
/// solve E v = Z^T K d by PCG, then u = K (d - Z v). E is applied matrix-free;
/// its preconditioner is the block diagonal of E, one r x r block per row of
/// U, formed and inverted at construction.
class DualPreconditioner {
 public:
  DualPreconditioner(const ConstraintOperator& op, const Matrix& U, double mu,
                     InnerSolveConfig cfg = {});

  Index m() const { return op_->m(); }
  Index n() const { return U_.rows(); }
  Index r() const { return U_.cols(); }
  double mu() const { return mu_; }

  /// Z v for v of length n r; v is vec of an r x n matrix W and Z v = A(U W).
  Vector z_apply(const Vector& v) const;
  /// Z^T w = vec(U^T (A^T w)).
  Vector zt_apply(const Vector& w) const;
  /// K d = (mu A A^T)^{-1} d.
  Vector k_apply(const Vector& d) const;
  /// E v = v + Z^T K Z v.
  Vector e_apply(const Vector& v) const;

  /// P d, the forward operator.
  Vector apply(const Vector& d) const;
  /// P^{-1} d up to the inner tolerance.
  PreconditionerSolve solve(const Vector& d) const;

  /// Diagonal blocks of E; block j couples entries j r .. j r + r - 1 of v.
  const std::vector<Matrix>& blocks() const { return blocks_; }

 private:
  Vector block_solve(const Vector& v) const;

  const ConstraintOperator* op_;
  Matrix U_;
  Matrix Ut_;
  double mu_;
  InnerSolveConfig cfg_;
  std::vector<Matrix> blocks_;
  // Inverses of the blocks, side by side (r x n r).
  Matrix block_inverses_;
};

}  // namespace iplr
