#include "iplr/linop.hpp"
#include "iplr/matcomp.hpp"
#include "iplr/problem.hpp"
#include "iplr/random.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <set>

using namespace iplr;
using namespace iplr::test;

// Frozen values below come from tests/oracles/rng_oracle.py.

TEST_CASE("rng stream matches the reference implementation") {
  std::mt19937_64 engine(5489);
  engine.discard(9999);
  CHECK(engine() == 9981545732273789042ULL);

  Rng u(1);
  CHECK(u.uniform() == 0.13387664401253274);
  CHECK(u.uniform() == 0.13640703636619733);
  CHECK(u.uniform() == 0.4512149038445382);

  Rng g(2);
  CHECK(g.normal() == doctest::Approx(0.26519244583197793).epsilon(1e-15));
  CHECK(g.normal() == doctest::Approx(0.6225185410623756).epsilon(1e-15));
  CHECK(g.normal() == doctest::Approx(1.0896209088019082).epsilon(1e-15));

  Rng b(3);
  const std::vector<std::uint64_t> expected{7, 7, 5, 9, 1, 8, 9, 8};
  for (auto e : expected) CHECK(b.below(10) == e);
  CHECK_THROWS_AS(b.below(0), std::invalid_argument);
}

TEST_CASE("build_mc_problem") {
  SUBCASE("single entry") {
    const std::vector<ObservedEntry> entries{{0, 0, 5.0}};
    const SdpProblem p = build_mc_problem(entries, 2);
    CHECK(p.n() == 4);
    CHECK(p.m() == 1);
    CHECK(p.b()(0) == 5.0);
    CHECK(p.is_completion());
    CHECK(p.nhat() == 2);
    CHECK(rel_diff(dense_cost(p), Matrix(0.5 * Matrix::Identity(4, 4))) == 0.0);
    const Matrix A = dense_constraint(p, 0);
    CHECK(A(0, 2) == 0.5);
    CHECK(A(2, 0) == 0.5);
    CHECK(A.cwiseAbs().sum() == 1.0);
  }
  SUBCASE("empty entry list is rejected") {
    CHECK_THROWS_AS(build_mc_problem(std::vector<ObservedEntry>{}, 2), std::invalid_argument);
  }
  SUBCASE("(1,2) and (2,1) are distinct") {
    const std::vector<ObservedEntry> entries{{0, 1, 3.0}, {1, 0, 4.0}};
    const SdpProblem p = build_mc_problem(entries, 2);
    CHECK(p.m() == 2);
    CHECK(p.omega()[0] == IndexPair{0, 1});
    CHECK(p.omega()[1] == IndexPair{1, 0});
  }
  SUBCASE("duplicates and out-of-range indices are rejected") {
    const std::vector<ObservedEntry> dup{{0, 1, 3.0}, {0, 1, 4.0}};
    CHECK_THROWS_AS(build_mc_problem(dup, 2), std::invalid_argument);
    const std::vector<ObservedEntry> out{{2, 0, 1.0}};
    CHECK_THROWS_AS(build_mc_problem(out, 2), std::invalid_argument);
    const std::vector<ObservedEntry> neg{{-1, 0, 1.0}};
    CHECK_THROWS_AS(build_mc_problem(neg, 2), std::invalid_argument);
  }
  SUBCASE("constraint i reads entry (s_i, t_i) of the off-diagonal block") {
    Rng rng(4);
    const Index nhat = 5;
    const auto omega = sample_omega(nhat, 9, 8);
    const Matrix Xbar = random_matrix(rng, nhat, nhat);
    std::vector<ObservedEntry> entries;
    for (const auto& q : omega) entries.push_back({q.s, q.t, 0.0});
    const SdpProblem p = build_mc_problem(entries, nhat);
    Matrix X = random_matrix(rng, 2 * nhat, 2 * nhat);
    X = (X + X.transpose()).eval();
    X.topRightCorner(nhat, nhat) = Xbar;
    X.bottomLeftCorner(nhat, nhat) = Xbar.transpose();
    const ConstraintOperator op(p);
    const Vector v = op.apply(X);
    for (std::size_t i = 0; i < omega.size(); ++i) CHECK(v(static_cast<Index>(i)) == doctest::Approx(Xbar(omega[i].s, omega[i].t)));
  }
}

TEST_CASE("general problems") {
  std::vector<std::vector<SymEntry>> cons{{{0, 1, 1.0}, {0, 1, 2.0}}, {{2, 2, 1.0}}};
  const SdpProblem p = SdpProblem::general(3, cons, {{0, 0, 1.0}}, Vector::Ones(2));
  CHECK(p.constraint(0).size() == 1);
  CHECK(p.constraint(0)[0].value == 3.0);
  CHECK_FALSE(p.is_completion());
  CHECK_THROWS_AS(p.nhat(), std::logic_error);
  CHECK_THROWS_AS(SdpProblem::general(3, cons, {}, Vector::Ones(3)), std::invalid_argument);
  std::vector<std::vector<SymEntry>> zero{{{0, 1, 1.0}, {0, 1, -1.0}}};
  CHECK_THROWS_AS(SdpProblem::general(3, zero, {}, Vector::Ones(1)), std::invalid_argument);
  std::vector<std::vector<SymEntry>> lower{{{1, 0, 1.0}}};
  const SdpProblem q = SdpProblem::general(3, lower, {}, Vector::Ones(1));
  CHECK(q.constraint(0)[0].row == 0);
  CHECK(q.constraint(0)[0].col == 1);
  CHECK(p.with_rhs(Vector::Zero(2)).b().norm() == 0.0);
  CHECK_THROWS_AS(p.with_rhs(Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("generate_random_lowrank") {
  const GroundTruth small = generate_random_lowrank(3, 1, 7);
  const Matrix frozen{{0.3503942467635151, -0.2353658534096108, -0.4391035374818307},
                      {0.7914530917823702, -0.5316326797647328, -0.9918252241941703},
                      {0.9145565629052821, -0.6143234025895418, -1.1460947938165431}};
  CHECK(rel_diff(small.B, frozen) < 1e-15);

  const GroundTruth t = generate_random_lowrank(100, 4, 1);
  const Vector s = Eigen::BDCSVD<Matrix>(t.B).singularValues();
  CHECK(s(4) / s(0) < 1e-10);
  CHECK(numerical_rank(t.B) == 4);
  CHECK(t.rank == 4);

  CHECK(numerical_rank(generate_random_lowrank(5, 5, 1).B) == 5);
  CHECK(generate_random_lowrank(20, 3, 9).B == generate_random_lowrank(20, 3, 9).B);
  CHECK_THROWS_AS(generate_random_lowrank(5, 6, 1), std::invalid_argument);
}

TEST_CASE("sample_omega") {
  CHECK(default_sample_count(600, 3) == 35910);
  CHECK(default_sample_count(1000, 8) == 223104);
  CHECK(default_sample_count(100, 3) == 2955);

  const auto frozen = sample_omega(4, 5, 3);
  const std::vector<IndexPair> expected{{3, 1}, {0, 2}, {1, 2}, {3, 2}, {0, 3}};
  CHECK(frozen == expected);

  const auto all = sample_omega(2, 4, 5);
  CHECK(all.size() == 4);
  CHECK(all == std::vector<IndexPair>{{0, 0}, {1, 0}, {0, 1}, {1, 1}});

  const auto big = sample_omega(50, 700, 11);
  std::set<std::pair<Index, Index>> seen;
  for (const auto& q : big) {
    CHECK(q.s >= 0);
    CHECK(q.s < 50);
    CHECK(q.t < 50);
    seen.insert({q.s, q.t});
  }
  CHECK(seen.size() == 700);
  CHECK(big == sample_omega(50, 700, 11));
  CHECK_THROWS_AS(sample_omega(2, 5, 1), std::invalid_argument);
}

TEST_CASE("add_noise") {
  Rng rng(5);
  const Vector b = random_vector(rng, 10000);
  CHECK(add_noise(b, 0.0, 3) == b);
  const double dist = (add_noise(b, 0.1, 3) - b).norm();
  CHECK(dist >= 8.0);
  CHECK(dist <= 12.0);
  CHECK(add_noise(b, 0.1, 3) == add_noise(b, 0.1, 3));
  CHECK_THROWS_AS(add_noise(b, -1.0, 3), std::invalid_argument);
}

TEST_CASE("generate_conditioned") {
  const GroundTruth t = generate_conditioned(60, 6, 100.0, 2);
  const Vector s = Eigen::BDCSVD<Matrix>(t.B).singularValues();
  CHECK(s(0) / s(5) == doctest::Approx(100.0).epsilon(1e-10));
  CHECK(s(6) / s(0) < 1e-12);

  const Vector two = Eigen::BDCSVD<Matrix>(generate_conditioned(10, 2, 5.0, 3).B).singularValues();
  CHECK(two(0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(two(1) == doctest::Approx(2.0).epsilon(1e-12));

  const Vector flat = Eigen::BDCSVD<Matrix>(generate_conditioned(10, 3, 1.0, 3).B).singularValues();
  for (Index i = 0; i < 3; ++i) CHECK(flat(i) == doctest::Approx(10.0).epsilon(1e-12));

  CHECK_THROWS_AS(generate_conditioned(10, 2, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_conditioned(10, 11, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_conditioned(10, 1, 2.0, 1), std::invalid_argument);
}

TEST_CASE("perturb_singular_values") {
  const GroundTruth t = generate_random_lowrank(60, 3, 4);
  CHECK(perturb_singular_values(t, 0.0, 1).B == t.B);
  const GroundTruth p = perturb_singular_values(t, 1e-3, 1);
  const Vector s = Eigen::BDCSVD<Matrix>(p.B).singularValues();
  CHECK(s(3) < 1e-2);
  CHECK(s(59) > 0.0);
  CHECK(numerical_rank(p.B, 1e-12) == 60);
  CHECK((p.B - t.B).norm() < 10 * 1e-3 * std::sqrt(60.0));
  CHECK(p.rank == 60);
  CHECK_THROWS_AS(perturb_singular_values(t, -1.0, 1), std::invalid_argument);
}

TEST_CASE("extract_recovered") {
  Matrix U = Matrix::Zero(4, 1);
  U(0, 0) = 1.0;
  U(2, 0) = 1.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  CHECK(extract_recovered({U, 0.5}, 2) == expected);
  CHECK(extract_recovered({Matrix::Zero(4, 2), 0.5}, 2).norm() == 0.0);

  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix V = random_matrix(rng, 12, 2);
    const Matrix X = 0.3 * Matrix::Identity(12, 12) + V * V.transpose();
    CHECK(rel_diff(extract_recovered({V, 0.3}, 6), Matrix(X.topRightCorner(6, 6))) < 1e-15);
  }
  CHECK_THROWS_AS(extract_recovered({Matrix::Zero(5, 1), 0.5}, 2), std::invalid_argument);
  CHECK_THROWS_AS(extract_recovered({Matrix::Zero(6, 1), 0.5}, 2), std::invalid_argument);
}
