#pragma once

#include "iplr/linop.hpp"

namespace iplr {

/// Evaluation point (U, y, mu) of the least-squares merit function
///   phi_mu(U, y) = 1/2 ||A(mu I + U U^T) - b||^2 + 1/2 ||(mu I + U U^T) S - mu I||_F^2
/// with S = C - A^T y. The slack and the thin products S U, S^2 U are formed
/// once here; the context is immutable afterwards.
class IterateContext {
 public:
  IterateContext(const ConstraintOperator& op, Matrix U, Vector y, double mu);

  const ConstraintOperator& op() const { return *op_; }
  const Matrix& U() const { return U_; }
  const Vector& y() const { return y_; }
  double mu() const { return mu_; }
  Index n() const { return U_.rows(); }
  Index r() const { return U_.cols(); }

  const SparseMatrix& S() const { return S_; }
  const Matrix& SU() const { return SU_; }
  const Matrix& SSU() const { return SSU_; }
  const Matrix& UtU() const { return UtU_; }

 private:
  const ConstraintOperator* op_;
  Matrix U_;
  Vector y_;
  double mu_;
  SparseMatrix S_;
  Matrix SU_;
  Matrix SSU_;
  Matrix UtU_;
};

/// Residual blocks F1 = A(X) - b and F2 = X S - mu I (not symmetrized), and
/// phi = (||F1||^2 + ||F2||_F^2) / 2.
struct Residuals {
  Vector F1;
  Matrix F2;
  double phi = 0.0;
};

Residuals residuals(const IterateContext& ctx);

// Jacobian blocks of the stacked residual with respect to (vec U, y):
//   J11 = A Q,  J21 = (S (x) I) Q,  J22 = -(I (x) X) A^T,
//   Q = (U (x) I) + (I (x) U) Pi.
// Vectors of length n r are vec of an n x r matrix; "Z" arguments are n x n.

/// Q v = W U^T + U W^T as an n x n matrix, W = mat(v).
Matrix q_apply(const Matrix& U, const Vector& v);
/// A(W U^T + U W^T), W = mat(v).
Vector j11_apply(const IterateContext& ctx, const Vector& v);
/// 2 vec((A^T w) U).
Vector j11t_apply(const IterateContext& ctx, const Vector& w);
/// vec(V S^2 U + S^2 V U), V = W U^T + U W^T; S is applied twice and V never
/// formed.
Vector j21t_j21_apply(const IterateContext& ctx, const Vector& v);
/// vec(Z S U + S Z^T U).
Vector j21t_apply(const IterateContext& ctx, const Matrix& Z);
/// -X (A^T w).
Matrix j22_apply(const IterateContext& ctx, const Vector& w);
/// -(A_i . X Z)_i, sampling only the needed entries of X Z.
Vector j22t_apply(const IterateContext& ctx, const Matrix& Z);
/// J22^T J22 w = A(X^2 A^T w) evaluated on the constraint pattern, without the
/// n x n intermediate of j22t_apply(j22_apply(w)).
Vector j22t_j22_apply(const IterateContext& ctx, const Vector& w);

/// grad phi = J^T F, split into the U block (n x r) and the y block.
struct Gradient {
  Matrix G_U;
  Vector g_y;
  double norm = 0.0;
};

Gradient grad_phi(const IterateContext& ctx, const Residuals& res);
Gradient grad_phi(const IterateContext& ctx);

}  // namespace iplr
