#include "iplr/jacobian.hpp"

#include "iplr/linalg.hpp"

#include <stdexcept>

namespace iplr {

IterateContext::IterateContext(const ConstraintOperator& op, Matrix U, Vector y, double mu)
    : op_(&op), U_(std::move(U)), y_(std::move(y)), mu_(mu) {
  if (U_.rows() != op.n()) throw std::invalid_argument("IterateContext: U must have n rows");
  if (y_.size() != op.m()) throw std::invalid_argument("IterateContext: y must have length m");
  if (!(mu_ > 0.0)) throw std::invalid_argument("IterateContext: mu must be positive");
  S_ = op.slack(y_);
  SU_ = S_ * U_;
  SSU_ = S_ * SU_;
  UtU_ = U_.transpose() * U_;
}

Residuals residuals(const IterateContext& ctx) {
  Residuals res;
  const double mu = ctx.mu();
  res.F1 = ctx.op().apply_lowrank(ctx.U(), mu) - ctx.op().problem().b();
  // X S - mu I = mu S + U (S U)^T - mu I, S symmetric.
  res.F2 = mu * Matrix(ctx.S());
  res.F2.noalias() += ctx.U() * ctx.SU().transpose();
  res.F2.diagonal().array() -= mu;
  res.phi = 0.5 * (res.F1.squaredNorm() + res.F2.squaredNorm());
  return res;
}

Matrix q_apply(const Matrix& U, const Vector& v) {
  const Matrix W = mat(v, U.rows(), U.cols());
  Matrix out = W * U.transpose();
  out += U * W.transpose();
  return out;
}

Vector j11_apply(const IterateContext& ctx, const Vector& v) {
  const Matrix W = mat(v, ctx.n(), ctx.r());
  // A_i symmetric, so A_i . (W U^T) = A_i . (U W^T).
  return 2.0 * ctx.op().apply_product(W, ctx.U());
}

Vector j11t_apply(const IterateContext& ctx, const Vector& w) {
  return 2.0 * vec(ctx.op().adjoint_times(w, ctx.U()));
}

Vector j21t_j21_apply(const IterateContext& ctx, const Vector& v) {
  const Matrix W = mat(v, ctx.n(), ctx.r());
  const Matrix& U = ctx.U();
  const Matrix& SSU = ctx.SSU();
  // V S^2 U = W (U^T S^2 U) + U (W^T S^2 U)
  Matrix out = W * (U.transpose() * SSU) + U * (W.transpose() * SSU);
  // S^2 (V U), V U = W (U^T U) + U (W^T U)
  const Matrix VU = W * ctx.UtU() + U * (W.transpose() * U);
  const Matrix SVU = ctx.S() * VU;
  out += ctx.S() * SVU;
  return vec(out);
}

Vector j21t_apply(const IterateContext& ctx, const Matrix& Z) {
  if (Z.rows() != ctx.n() || Z.cols() != ctx.n()) {
    throw std::invalid_argument("j21t_apply: Z must be n x n");
  }
  Matrix out = Z * ctx.SU();
  const Matrix ZtU = Z.transpose() * ctx.U();
  out += ctx.S() * ZtU;
  return vec(out);
}

Matrix j22_apply(const IterateContext& ctx, const Vector& w) {
  const SparseMatrix M = ctx.op().adjoint(w);
  // X M = mu M + U (M U)^T
  const Matrix MU = M * ctx.U();
  Matrix out = -ctx.mu() * Matrix(M);
  out.noalias() -= ctx.U() * MU.transpose();
  return out;
}

Vector j22t_apply(const IterateContext& ctx, const Matrix& Z) {
  if (Z.rows() != ctx.n() || Z.cols() != ctx.n()) {
    throw std::invalid_argument("j22t_apply: Z must be n x n");
  }
  // X Z = mu Z + U W, W = U^T Z; only the sampled entries of U W are formed.
  const Matrix Wt = Z.transpose() * ctx.U();
  return -(ctx.mu() * ctx.op().apply(Z) + ctx.op().apply_product(ctx.U(), Wt));
}

Vector j22t_j22_apply(const IterateContext& ctx, const Vector& w) {
  const double mu = ctx.mu();
  const SparseMatrix M = ctx.op().adjoint(w);
  // X^2 M = mu^2 M + U (2 mu I + U^T U) (M U)^T
  const Matrix MU = M * ctx.U();
  Matrix inner = ctx.UtU();
  inner.diagonal().array() += 2.0 * mu;
  const Matrix R = MU * inner;  // inner is symmetric
  return mu * mu * ctx.op().apply_sparse(M) + ctx.op().apply_product(ctx.U(), R);
}

Gradient grad_phi(const IterateContext& ctx, const Residuals& res) {
  Gradient g;
  g.G_U = mat(j11t_apply(ctx, res.F1) + j21t_apply(ctx, res.F2), ctx.n(), ctx.r());
  g.g_y = j22t_apply(ctx, res.F2);
  g.norm = std::sqrt(g.G_U.squaredNorm() + g.g_y.squaredNorm());
  return g;
}

Gradient grad_phi(const IterateContext& ctx) { return grad_phi(ctx, residuals(ctx)); }

}  // namespace iplr
