#include "iplr/precond.hpp"

#include "iplr/linalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace iplr {

DualPreconditioner::DualPreconditioner(const ConstraintOperator& op, const Matrix& U, double mu,
                                       InnerSolveConfig cfg)
    : op_(&op), U_(U), Ut_(U.transpose()), mu_(mu), cfg_(cfg) {
  if (!(mu > 0.0)) throw std::invalid_argument("DualPreconditioner: mu must be positive");
  if (U.rows() != op.n()) throw std::invalid_argument("DualPreconditioner: U must have n rows");

  const Index n = U_.rows();
  const Index r = U_.cols();
  const SdpProblem& problem = op.problem();

  // rows[j] lists (i, (A_i U)_{j,:}) for every constraint touching row j.
  std::vector<std::vector<std::pair<Index, Eigen::RowVectorXd>>> rows(static_cast<std::size_t>(n));
  auto add = [&](Index j, Index i, const Eigen::RowVectorXd& z) {
    rows[static_cast<std::size_t>(j)].emplace_back(i, z);
  };
  for (Index i = 0; i < problem.m(); ++i) {
    for (const auto& e : problem.constraint(i)) {
      add(e.row, i, e.value * U_.row(e.col));
      if (e.row != e.col) add(e.col, i, e.value * U_.row(e.row));
    }
  }
  // A constraint may touch row j through several entries; merge them.
  for (auto& list : rows) {
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<Index, Eigen::RowVectorXd>> merged;
    for (auto& item : list) {
      if (!merged.empty() && merged.back().first == item.first) {
        merged.back().second += item.second;
      } else {
        merged.push_back(std::move(item));
      }
    }
    list = std::move(merged);
  }

  blocks_.assign(static_cast<std::size_t>(n), Matrix::Identity(r, r));
  block_inverses_.resize(r, n * r);
  const auto scale = op.gram_scale();
  for (Index j = 0; j < n; ++j) {
    const auto& list = rows[static_cast<std::size_t>(j)];
    Matrix& block = blocks_[static_cast<std::size_t>(j)];
    if (scale) {
      const double k = 1.0 / (mu * *scale);
      for (const auto& [i, z] : list) block.noalias() += k * z.transpose() * z;
    } else {
      const Matrix& ginv = op.gram_inverse();
      for (const auto& [i, zi] : list)
        for (const auto& [i2, zi2] : list) block.noalias() += (ginv(i, i2) / mu) * zi.transpose() * zi2;
    }
    // Blocks are I + (psd), so the Cholesky factorization cannot fail.
    block_inverses_.middleCols(j * r, r) = Eigen::LLT<Matrix>(block).solve(Matrix::Identity(r, r));
  }
}

Vector DualPreconditioner::z_apply(const Vector& v) const {
  if (v.size() != n() * r()) throw std::invalid_argument("z_apply: v must have length n r");
  // (Z v)_i = A_i . (U W), W = mat(v, r, n); column q of W is block q of v.
  const SdpProblem& problem = op_->problem();
  const Index rr = r();
  const double* ut = Ut_.data();
  const double* pv = v.data();
  Vector out(m());
  for (Index i = 0; i < m(); ++i) {
    double acc = 0.0;
    for (const auto& e : problem.constraint(i)) {
      const double* up = ut + e.row * rr;
      const double* wq = pv + e.col * rr;
      double t = 0.0;
      for (Index k = 0; k < rr; ++k) t += up[k] * wq[k];
      if (e.row != e.col) {
        const double* uq = ut + e.col * rr;
        const double* wp = pv + e.row * rr;
        for (Index k = 0; k < rr; ++k) t += uq[k] * wp[k];
      }
      acc += e.value * t;
    }
    out(i) = acc;
  }
  return out;
}

Vector DualPreconditioner::zt_apply(const Vector& w) const {
  if (w.size() != m()) throw std::invalid_argument("zt_apply: w must have length m");
  // Block j of Z^T w is ((A^T w) U)_{j,:}^T.
  const SdpProblem& problem = op_->problem();
  const Index rr = r();
  const double* ut = Ut_.data();
  Vector out = Vector::Zero(n() * rr);
  double* po = out.data();
  for (Index i = 0; i < m(); ++i) {
    if (w(i) == 0.0) continue;
    for (const auto& e : problem.constraint(i)) {
      const double c = w(i) * e.value;
      const double* uq = ut + e.col * rr;
      double* op = po + e.row * rr;
      for (Index k = 0; k < rr; ++k) op[k] += c * uq[k];
      if (e.row != e.col) {
        const double* up = ut + e.row * rr;
        double* oq = po + e.col * rr;
        for (Index k = 0; k < rr; ++k) oq[k] += c * up[k];
      }
    }
  }
  return out;
}

Vector DualPreconditioner::k_apply(const Vector& d) const { return op_->solve_gram(d) / mu_; }

Vector DualPreconditioner::e_apply(const Vector& v) const { return v + zt_apply(k_apply(z_apply(v))); }

Vector DualPreconditioner::apply(const Vector& d) const {
  return mu_ * (op_->gram() * d) + z_apply(zt_apply(d));
}

Vector DualPreconditioner::block_solve(const Vector& v) const {
  const Index rr = r();
  Vector out(v.size());
  for (Index j = 0; j < n(); ++j) {
    out.segment(j * rr, rr).noalias() = block_inverses_.middleCols(j * rr, rr) * v.segment(j * rr, rr);
  }
  return out;
}

PreconditionerSolve DualPreconditioner::solve(const Vector& d) const {
  if (d.size() != m()) throw std::invalid_argument("DualPreconditioner::solve: d must have length m");
  PreconditionerSolve out;
  const Vector Kd = k_apply(d);
  if (r() == 0) {
    out.u = Kd;
    out.stats.converged = true;
    return out;
  }
  auto inner = cg([this](const Vector& v) { return e_apply(v); }, zt_apply(Kd), cfg_.tol, cfg_.maxit,
                  [this](const Vector& v) { return block_solve(v); });
  out.stats = inner.stats;
  out.warning = !inner.stats.converged;
  out.u = k_apply(d - z_apply(inner.x));
  return out;
}

}  // namespace iplr
