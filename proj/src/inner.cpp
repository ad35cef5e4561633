#include "iplr/inner.hpp"

#include "iplr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace iplr {

namespace {

void check_finite(const Residuals& res) {
  if (!std::isfinite(res.phi)) throw std::runtime_error("inner solver: non-finite residual");
}

}  // namespace

InnerResult gauss_seidel(const ConstraintOperator& op, const Matrix& U0, const Vector& y0, double mu,
                         double eta2, int max_sweeps, const InnerConfig& cfg) {
  InnerResult out{U0, y0, {}};
  InnerStats& st = out.stats;

  for (int sweep = 0;; ++sweep) {
    const IterateContext ctx(op, out.U, out.y, mu);
    const Residuals res = residuals(ctx);
    check_finite(res);
    const Gradient g = grad_phi(ctx, res);
    st.grad_norm = g.norm;
    st.phi = res.phi;
    if (g.norm <= eta2 * mu) {
      st.converged = true;
      break;
    }
    if (sweep >= max_sweeps) break;

    // U step: (J11^T J11 + J21^T J21) dU = J11^T r + J21^T R, r = -F1, R = -F2.
    const Vector rhs_u = -(j11t_apply(ctx, res.F1) + j21t_apply(ctx, res.F2));
    auto primal = cg(
        [&ctx](const Vector& v) { return Vector(j11t_apply(ctx, j11_apply(ctx, v)) + j21t_j21_apply(ctx, v)); },
        rhs_u, cfg.cg_tol, cfg.cg_maxit);
    st.cg_primal_iterations += primal.stats.iterations;
    if (primal.stats.breakdown) {
      st.failed = true;
      st.failure = "cg breakdown in the U step";
      break;
    }
    out.U += mat(primal.x, ctx.n(), ctx.r());

    // y step with R recomputed at the new U.
    const IterateContext ctx_u(op, out.U, out.y, mu);
    const Residuals res_u = residuals(ctx_u);
    check_finite(res_u);
    const Vector rhs_y = -j22t_apply(ctx_u, res_u.F2);
    auto normal = [&ctx_u](const Vector& w) { return j22t_j22_apply(ctx_u, w); };
    KrylovResult dual;
    if (cfg.use_preconditioner) {
      const DualPreconditioner P(op, out.U, mu, cfg.precond);
      dual = cg(normal, rhs_y, cfg.cg_tol, cfg.cg_maxit, [&](const Vector& d) {
        PreconditionerSolve s = P.solve(d);
        st.precond_inner_iterations += s.stats.iterations;
        if (s.warning) ++st.precond_warnings;
        return s.u;
      });
    } else {
      dual = cg(normal, rhs_y, cfg.cg_tol, cfg.cg_maxit);
    }
    st.cg_dual_iterations += dual.stats.iterations;
    if (dual.stats.breakdown) {
      st.failed = true;
      st.failure = "cg breakdown in the y step";
      break;
    }
    out.y += dual.x;
    ++st.iterations;
  }
  return out;
}

InnerResult bb_minimize(const ConstraintOperator& op, const Matrix& U0, const Vector& y0, double mu,
                        const InnerConfig& cfg) {
  const Index n = U0.rows();
  const Index r = U0.cols();
  const Index nr = n * r;
  const Index m = y0.size();

  auto unpack_U = [&](const Vector& x) { return mat(x.head(nr), n, r); };
  auto evaluate = [&](const Vector& x, Vector* grad) {
    const IterateContext ctx(op, unpack_U(x), x.tail(m), mu);
    const Residuals res = residuals(ctx);
    check_finite(res);
    if (grad) {
      const Gradient g = grad_phi(ctx, res);
      grad->resize(nr + m);
      grad->head(nr) = vec(g.G_U);
      grad->tail(m) = g.g_y;
    }
    return res.phi;
  };

  Vector x(nr + m);
  x.head(nr) = vec(U0);
  x.tail(m) = y0;
  Vector g;
  double f = evaluate(x, &g);

  InnerStats st;
  const double tol = std::min(cfg.bb_grad_cap, mu);
  std::deque<double> window{f};
  double step = cfg.bb_initial_step;

  while (true) {
    st.grad_norm = g.norm();
    st.phi = f;
    if (st.grad_norm <= tol) {
      st.converged = true;
      break;
    }
    if (st.iterations >= cfg.bb_maxit) break;

    const double reference = *std::max_element(window.begin(), window.end());
    const double slope = -g.squaredNorm();
    double lambda = step;
    Vector x_next;
    double f_next = 0.0;
    bool accepted = false;
    for (int bt = 0; bt <= cfg.bb_max_backtracks; ++bt) {
      x_next = x - lambda * g;
      f_next = evaluate(x_next, nullptr);
      if (f_next <= reference + cfg.bb_armijo * lambda * slope) {
        accepted = true;
        break;
      }
      lambda *= cfg.bb_backtrack;
    }
    if (!accepted) {
      st.failed = true;
      st.failure = "line search failed";
      break;
    }

    Vector g_next;
    evaluate(x_next, &g_next);
    const Vector s = x_next - x;
    const Vector dg = g_next - g;
    const double sty = s.dot(dg);
    // Non-positive curvature: restart from the initial step.
    step = sty > 0.0 ? s.squaredNorm() / sty : cfg.bb_initial_step;
    step = std::clamp(step, cfg.bb_min_step, cfg.bb_max_step);

    if (cfg.bb_record_trace) st.trace.push_back({f, f_next, reference, lambda, slope});
    x = std::move(x_next);
    g = std::move(g_next);
    f = f_next;
    window.push_back(f);
    if (static_cast<int>(window.size()) > cfg.bb_memory) window.pop_front();
    ++st.iterations;
  }

  return {unpack_U(x), x.tail(m), st};
}

}  // namespace iplr
