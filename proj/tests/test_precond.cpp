#include "iplr/jacobian.hpp"
#include "iplr/precond.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace iplr;
using namespace iplr::test;

namespace {

struct DensePreconditioner {
  Matrix Z;  // A (I_n (x) U)
  Matrix P;  // mu A A^T + Z Z^T
  Matrix E;  // I + Z^T (mu A A^T)^{-1} Z
  Matrix N;  // A (I_n (x) X^2) A^T
};

DensePreconditioner dense_preconditioner(const SdpProblem& p, const Matrix& U, double mu) {
  const Index n = p.n();
  const Matrix A = dense_A(p);
  const Matrix G = A * A.transpose();
  const Matrix X = mu * Matrix::Identity(n, n) + U * U.transpose();
  DensePreconditioner d;
  d.Z = A * kron(Matrix::Identity(n, n), U);
  d.P = mu * G + d.Z * d.Z.transpose();
  d.E = Matrix::Identity(d.Z.cols(), d.Z.cols()) + d.Z.transpose() * (mu * G).ldlt().solve(d.Z);
  d.N = A * kron(Matrix::Identity(n, n), X * X) * A.transpose();
  return d;
}

double condition(const Matrix& S) {
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(S).eigenvalues();
  return ev.maxCoeff() / ev.minCoeff();
}

}  // namespace

TEST_CASE("U = 0 reduces to the scaled Gram inverse") {
  Rng rng(1);
  const SdpProblem p = random_completion_problem(rng, 4, 6);
  const ConstraintOperator op(p);
  const DualPreconditioner P(op, Matrix::Zero(8, 2), 0.25);
  for (const auto& b : P.blocks()) CHECK(b == Matrix::Identity(2, 2));
  const Vector d = random_vector(rng, 6);
  CHECK(rel_diff(P.solve(d).u, Vector(2.0 * d / 0.25)) < 1e-14);
  CHECK(rel_diff(P.apply(d), Vector(0.25 * 0.5 * d)) < 1e-14);
  CHECK(P.solve(Vector::Zero(6)).u.norm() == 0.0);
}

TEST_CASE("constructor checks") {
  Rng rng(2);
  const SdpProblem p = random_completion_problem(rng, 4, 6);
  const ConstraintOperator op(p);
  CHECK_THROWS_AS(DualPreconditioner(op, Matrix::Zero(8, 2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DualPreconditioner(op, Matrix::Zero(7, 2), 1.0), std::invalid_argument);
}

TEST_CASE("Z actions and M blocks match dense constructions") {
  Rng rng(3);
  auto check = [&](const SdpProblem& p, Index r, double mu) {
    const ConstraintOperator op(p);
    const Matrix U = random_matrix(rng, p.n(), r);
    const DualPreconditioner P(op, U, mu);
    const DensePreconditioner D = dense_preconditioner(p, U, mu);
    const Vector v = random_vector(rng, p.n() * r);
    const Vector w = random_vector(rng, p.m());
    CHECK(rel_diff(P.z_apply(v), Vector(D.Z * v)) < 1e-12);
    CHECK(rel_diff(P.zt_apply(w), Vector(D.Z.transpose() * w)) < 1e-12);
    CHECK(rel_diff(P.e_apply(v), Vector(D.E * v)) < 1e-11);
    CHECK(rel_diff(P.apply(w), Vector(D.P * w)) < 1e-12);
    for (Index j = 0; j < p.n(); ++j) {
      const Matrix block = D.E.block(j * r, j * r, r, r);
      CHECK(rel_diff(P.blocks()[static_cast<std::size_t>(j)], block) < 1e-11);
    }
    // Gauss-Seidel's dual normal matrix is the N of the dense oracle.
    const IterateContext ctx(op, U, Vector::Zero(p.m()), mu);
    CHECK(rel_diff(j22t_j22_apply(ctx, w), Vector(D.N * w)) < 1e-11);
  };
  SUBCASE("completion n = 8, r = 2, m = 6") { check(random_completion_problem(rng, 4, 6), 2, 0.3); }
  SUBCASE("completion grid") {
    for (Index r : {1, 3})
      for (double mu : {1e-3, 1.0}) check(random_completion_problem(rng, 6, 20), r, mu);
  }
  SUBCASE("general constraints") {
    for (Index r : {1, 2}) check(random_general_problem(rng, 7, 9, 4), r, 0.1);
  }
}

TEST_CASE("solve inverts apply") {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const SdpProblem p = trial < 3 ? random_completion_problem(rng, 6, 18) : random_general_problem(rng, 8, 10);
    const ConstraintOperator op(p);
    const Matrix U = random_matrix(rng, p.n(), 2);
    const double mu = trial % 2 == 0 ? 1e-2 : 0.5;
    const DualPreconditioner P(op, U, mu);
    const DensePreconditioner D = dense_preconditioner(p, U, mu);
    const Vector d = random_vector(rng, p.m());
    const PreconditionerSolve s = P.solve(d);
    CHECK_FALSE(s.warning);
    CHECK(rel_diff(Vector(D.P * s.u), d) < 1e-6);
    CHECK(rel_diff(P.apply(s.u), d) < 1e-6);
    CHECK(rel_diff(s.u, Vector(D.P.ldlt().solve(d))) < 1e-6);

    const Vector d2 = random_vector(rng, p.m());
    const Vector lhs = P.solve(Vector(-1.7 * d + d2)).u;
    const Vector rhs = -1.7 * s.u + P.solve(d2).u;
    CHECK(rel_diff(lhs, rhs) < 1e-6);
  }
}

TEST_CASE("inner solve that cannot converge sets the warning flag") {
  Rng rng(5);
  const SdpProblem p = random_completion_problem(rng, 6, 20);
  const ConstraintOperator op(p);
  const DualPreconditioner P(op, 3.0 * random_matrix(rng, 12, 3), 1e-4, {1e-14, 1});
  const PreconditionerSolve s = P.solve(random_vector(rng, 20));
  CHECK(s.warning);
  CHECK(s.stats.iterations == 1);
  CHECK(s.u.allFinite());
}

TEST_CASE("production preconditioner reduces the condition number for small mu") {
  Rng rng(6);
  int trials = 0;
  for (Index nhat : {5, 8}) {
    for (Index r : {1, 2, 3}) {
      for (double mu : {1e-2, 1e-3, 1e-4}) {
        const SdpProblem p = random_completion_problem(rng, nhat, std::min(default_sample_count(nhat, r), nhat * nhat));
        const Matrix U = random_matrix(rng, p.n(), r);
        const DensePreconditioner D = dense_preconditioner(p, U, mu);
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(D.N, D.P, Eigen::EigenvaluesOnly);
        const double kappa_pre = ges.eigenvalues().maxCoeff() / ges.eigenvalues().minCoeff();
        CHECK(kappa_pre < condition(D.N));
        ++trials;
      }
    }
  }
  CHECK(trials == 18);
}
