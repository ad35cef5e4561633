#pragma once

#include "iplr/problem.hpp"

#include <cmath>
#include <functional>
#include <utility>

namespace iplr {

struct KrylovStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  bool breakdown = false;
};

struct KrylovResult {
  Vector x;
  KrylovStats stats;
};

using LinearMap = std::function<Vector(const Vector&)>;

/// Conjugate gradients for a symmetric positive semidefinite operator.
///
/// The iteration always starts from x = 0, so on a consistent singular system
/// the iterates stay in the range of the operator and converge to the
/// minimum-norm solution. The stopping test uses the recurrence residual
/// ||r_k|| / ||rhs||, unpreconditioned, even when a preconditioner is
/// supplied; the preconditioner is applied once per iteration.
///
/// A direction with curvature p^T A p <= 1e-14 ||rhs|| ||p|| ends the
/// iteration with breakdown set; x is the last iterate.
template <class Apply, class Precond>
KrylovResult cg(Apply&& apply, const Vector& rhs, double tol, int maxit, Precond&& precond) {
  KrylovResult out;
  out.x = Vector::Zero(rhs.size());
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    out.stats.converged = true;
    return out;
  }

  Vector r = rhs;
  Vector z = precond(r);
  Vector p = z;
  double rz = r.dot(z);
  double res = 1.0;

  for (int k = 0; k < maxit; ++k) {
    const Vector Ap = apply(p);
    const double curv = p.dot(Ap);
    if (!(curv > 1e-14 * rhs_norm * p.norm())) {
      out.stats.breakdown = true;
      break;
    }
    const double alpha = rz / curv;
    out.x.noalias() += alpha * p;
    r.noalias() -= alpha * Ap;
    ++out.stats.iterations;
    res = r.norm() / rhs_norm;
    if (res <= tol) {
      out.stats.converged = true;
      break;
    }
    z = precond(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  out.stats.relative_residual = res;
  return out;
}

template <class Apply>
KrylovResult cg(Apply&& apply, const Vector& rhs, double tol, int maxit) {
  return cg(std::forward<Apply>(apply), rhs, tol, maxit, [](const Vector& v) { return v; });
}

}  // namespace iplr
