#pragma once

#include "iplr/problem.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

#include <optional>
#include <vector>

namespace iplr {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// The constraint map X -> (A_i . X)_i of an SdpProblem, its adjoint, and
/// solves with the Gram matrix A A^T.
///
/// Every contraction only touches the coordinates stored for each A_i, so the
/// cost of a product is proportional to the stored entries times the inner
/// dimension of the low-rank factors involved. The sparsity pattern of
/// C - A^T y is fixed per problem and allocated at construction. Instances are
/// immutable after construction and safe to share between threads.
class ConstraintOperator {
 public:
  explicit ConstraintOperator(const SdpProblem& problem);

  const SdpProblem& problem() const { return *problem_; }
  Index n() const { return problem_->n(); }
  Index m() const { return problem_->m(); }

  /// (A_i . (mu I + U U^T))_i.
  Vector apply_lowrank(const Matrix& U, double mu) const;

  /// (A_i . M)_i for an arbitrary dense n x n matrix M.
  Vector apply(const Matrix& M) const;

  /// (A_i . (L R^T))_i for n x k factors L and R, sampling only the needed
  /// entries of L R^T.
  Vector apply_product(const Matrix& L, const Matrix& R) const;

  /// (A_i . M)_i for a sparse M sharing the slack pattern.
  Vector apply_sparse(const SparseMatrix& M) const;

  /// A^T w = sum_i w_i A_i on the fixed slack pattern (both triangles stored).
  SparseMatrix adjoint(const Vector& w) const;

  /// (A^T w) U without forming A^T w.
  Matrix adjoint_times(const Vector& w, const Matrix& U) const;

  /// C - A^T y on the fixed slack pattern.
  SparseMatrix slack(const Vector& y) const;

  /// C as a sparse matrix on the slack pattern.
  SparseMatrix cost() const { return slack(Vector::Zero(m())); }

  /// (A A^T)^{-1} d. Completion problems use A A^T = I/2 directly; general
  /// problems reuse a Cholesky factorization of the Gram matrix built at
  /// construction. Throws std::runtime_error if the constraints are dependent.
  Vector solve_gram(const Vector& d) const;

  /// Scalar c with A A^T = c I, when the operator has that structure.
  std::optional<double> gram_scale() const { return gram_scale_; }

  /// Dense m x m Gram matrix A A^T.
  Matrix gram() const;

  /// Dense (A A^T)^{-1}; only valid for general operators with an
  /// independent constraint set.
  const Matrix& gram_inverse() const;

 private:
  void build_slack_pattern();
  void build_gram();

  const SdpProblem* problem_;
  SparseMatrix pattern_;
  // Value slots in pattern_ for each stored constraint entry (upper and lower
  // position; equal on the diagonal), aligned with the problem's entry order.
  std::vector<std::pair<Index, Index>> constraint_slots_;
  std::vector<std::pair<Index, Index>> cost_slots_;
  std::optional<double> gram_scale_;
  Matrix gram_dense_;
  std::optional<Eigen::LLT<Matrix>> gram_factor_;
  Matrix gram_inverse_;
  bool gram_singular_ = false;
};

}  // namespace iplr
