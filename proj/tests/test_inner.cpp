#include "iplr/inner.hpp"
#include "iplr/linalg.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/QR>

using namespace iplr;
using namespace iplr::test;

namespace {

Matrix pinv(const Matrix& M) { return M.completeOrthogonalDecomposition().pseudoInverse(); }

// Problem whose constraints span every symmetric matrix, so that for any
// X = mu I + U U^T there is a y with F = 0 exactly.
struct StationaryPoint {
  SdpProblem problem;
  Matrix U;
  Vector y;
  double mu;
};

StationaryPoint stationary_point(Rng& rng, Index n, Index r, double mu) {
  std::vector<std::vector<SymEntry>> cons;
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) cons.push_back({{i, j, 1.0}});
  std::vector<SymEntry> cost;
  for (Index i = 0; i < n; ++i) cost.push_back({i, i, 1.0});
  const Matrix U = random_matrix(rng, n, r);
  const Matrix X = mu * Matrix::Identity(n, n) + U * U.transpose();
  const SdpProblem shape = SdpProblem::general(n, cons, cost, Vector::Zero(static_cast<Index>(cons.size())));
  const Matrix A = dense_A(shape);
  const SdpProblem p = shape.with_rhs(A * vec(X));
  const Matrix S = mu * X.inverse();
  const Vector y = pinv(A.transpose()) * vec(Matrix(dense_cost(p) - S));
  return {p, U, y, mu};
}

}  // namespace

TEST_CASE("gauss_seidel returns immediately at a stationary point") {
  Rng rng(1);
  const StationaryPoint sp = stationary_point(rng, 4, 2, 0.3);
  const ConstraintOperator op(sp.problem);
  const InnerResult res = gauss_seidel(op, sp.U, sp.y, sp.mu, 2.0, 5, InnerConfig{});
  CHECK(res.stats.iterations == 0);
  CHECK(res.stats.converged);
  CHECK(res.stats.grad_norm < 1e-10);
  CHECK(res.U == sp.U);
  CHECK(res.y == sp.y);
}

TEST_CASE("bb_minimize returns immediately at a stationary point") {
  Rng rng(2);
  const StationaryPoint sp = stationary_point(rng, 4, 1, 0.3);
  const ConstraintOperator op(sp.problem);
  InnerConfig cfg;
  cfg.method = InnerMethod::BarzilaiBorwein;
  const InnerResult res = bb_minimize(op, sp.U, sp.y, sp.mu, cfg);
  CHECK(res.stats.iterations == 0);
  CHECK(res.stats.converged);
}

TEST_CASE("one sweep matches the dense Gauss-Newton solves") {
  Rng rng(3);
  for (bool precond : {false, true}) {
    const SdpProblem p = random_completion_problem(rng, 4, 4);
    const ConstraintOperator op(p);
    const Matrix U0 = random_matrix(rng, 8, 1);
    const Vector y0 = 0.1 * random_vector(rng, 4);
    const double mu = 0.5;
    InnerConfig cfg;
    cfg.cg_tol = 1e-12;
    cfg.use_preconditioner = precond;
    cfg.precond.tol = 1e-13;
    const InnerResult res = gauss_seidel(op, U0, y0, mu, 0.0, 1, cfg);
    CHECK(res.stats.iterations == 1);
    CHECK_FALSE(res.stats.converged);

    const DenseJacobian d0 = dense_jacobian(p, U0, y0, mu);
    Matrix JU(d0.J11.rows() + d0.J21.rows(), d0.J11.cols());
    JU << d0.J11, d0.J21;
    const Vector dU = pinv(JU) * (-d0.F);
    const Matrix U1 = U0 + mat(dU, 8, 1);
    CHECK(rel_diff(res.U, U1) < 1e-8);

    const DenseJacobian d1 = dense_jacobian(p, U1, y0, mu);
    const Vector dy = pinv(d1.J22) * (-d1.F.tail(64));
    CHECK(rel_diff(Vector(res.y - y0), dy) < 1e-7);
  }
}

TEST_CASE("sweeps do not increase phi on toy instances") {
  Rng rng(4);
  InnerConfig cfg;
  cfg.cg_tol = 1e-10;
  cfg.cg_maxit = 500;
  for (int trial = 0; trial < 6; ++trial) {
    const Index nhat = 4 + trial % 3;
    const Index r = 1 + trial % 2;
    const SdpProblem p = random_completion_problem(rng, nhat, nhat * nhat - 2);
    const ConstraintOperator op(p);
    Matrix U = Matrix::Identity(2 * nhat, r);
    Vector y = Vector::Zero(p.m());
    const double mu = 0.5;
    double phi = residuals(IterateContext(op, U, y, mu)).phi;
    for (int sweep = 0; sweep < 10; ++sweep) {
      InnerResult res = gauss_seidel(op, U, y, mu, 0.0, 1, cfg);
      const double next = residuals(IterateContext(op, res.U, res.y, mu)).phi;
      CHECK(next <= phi * (1 + 1e-10) + 1e-14);
      phi = next;
      U = std::move(res.U);
      y = std::move(res.y);
    }
  }
}

TEST_CASE("the U-step operator is positive semidefinite") {
  Rng rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const SdpProblem p = trial < 2 ? random_completion_problem(rng, 5, 12) : random_general_problem(rng, 9, 7);
    const ConstraintOperator op(p);
    const IterateContext ctx(op, random_matrix(rng, p.n(), 2), random_vector(rng, p.m()), 0.2);
    for (int probe = 0; probe < 50; ++probe) {
      const Vector v = random_vector(rng, p.n() * 2);
      const Vector Av = j11t_apply(ctx, j11_apply(ctx, v)) + j21t_j21_apply(ctx, v);
      CHECK(v.dot(Av) / v.squaredNorm() >= -1e-12);
    }
  }
}

TEST_CASE("gauss_seidel honours the sweep cap and reports CG work") {
  Rng rng(6);
  const SdpProblem p = random_completion_problem(rng, 8, 40);
  const ConstraintOperator op(p);
  const InnerResult res = gauss_seidel(op, Matrix::Identity(16, 2), Vector::Zero(40), 0.5, 1e-12, 3, InnerConfig{});
  CHECK(res.stats.iterations == 3);
  CHECK_FALSE(res.stats.converged);
  CHECK(res.stats.cg_primal_iterations > 0);
  CHECK(res.stats.cg_dual_iterations > 0);
  CHECK(res.stats.precond_inner_iterations > 0);
  const InnerResult none = gauss_seidel(op, Matrix::Identity(16, 2), Vector::Zero(40), 0.5, 1e-12, 0, InnerConfig{});
  CHECK(none.stats.iterations == 0);
}

TEST_CASE("gauss_seidel rejects non-finite input") {
  Rng rng(7);
  const SdpProblem p = random_completion_problem(rng, 3, 5);
  const ConstraintOperator op(p);
  Matrix U = Matrix::Identity(6, 1);
  U(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(gauss_seidel(op, U, Vector::Zero(5), 0.5, 1.0, 5, InnerConfig{}));
}

TEST_CASE("bb steps satisfy the nonmonotone Armijo condition") {
  Rng rng(8);
  const SdpProblem p = random_completion_problem(rng, 6, 25);
  const ConstraintOperator op(p);
  InnerConfig cfg;
  cfg.method = InnerMethod::BarzilaiBorwein;
  cfg.bb_record_trace = true;
  const InnerResult res = bb_minimize(op, Matrix::Identity(12, 2), Vector::Zero(25), 0.25, cfg);
  REQUIRE(!res.stats.trace.empty());
  CHECK(res.stats.trace.size() == static_cast<std::size_t>(res.stats.iterations));
  double prev_reference = std::numeric_limits<double>::infinity();
  std::vector<double> history{res.stats.trace.front().phi_before};
  for (const auto& e : res.stats.trace) {
    CHECK(e.slope < 0.0);
    CHECK(e.step >= cfg.bb_min_step * std::pow(cfg.bb_backtrack, cfg.bb_max_backtracks));
    CHECK(e.phi_after <= e.reference + cfg.bb_armijo * e.step * e.slope);
    const auto first = history.size() > static_cast<std::size_t>(cfg.bb_memory) ? history.end() - cfg.bb_memory
                                                                                   : history.begin();
    CHECK(e.reference == *std::max_element(first, history.end()));
    CHECK(e.reference <= prev_reference);
    prev_reference = e.reference;
    history.push_back(e.phi_after);
  }
  CHECK(res.stats.phi < res.stats.trace.front().phi_before);
}

TEST_CASE("bb on the quadratic merit with U = 0 reaches the least-squares y") {
  // With U = 0 the U-gradient vanishes, so phi is a quadratic in y alone.
  Rng rng(9);
  const SdpProblem p = random_general_problem(rng, 6, 5);
  const ConstraintOperator op(p);
  const double mu = 1.0;
  InnerConfig cfg;
  cfg.method = InnerMethod::BarzilaiBorwein;
  cfg.bb_grad_cap = 1e-11;
  cfg.bb_maxit = 5000;
  const InnerResult res = bb_minimize(op, Matrix::Zero(6, 1), Vector::Zero(5), mu, cfg);
  CHECK(res.stats.converged);
  CHECK(res.U.norm() == 0.0);
  const Matrix At = dense_A(p).transpose();
  const Vector target = vec(Matrix(dense_cost(p) - Matrix::Identity(6, 6)));
  const Vector y_star = At.colPivHouseholderQr().solve(target);
  CHECK(rel_diff(res.y, y_star) < 1e-8);
}
