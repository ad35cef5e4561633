#include "iplr/linop.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace iplr {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

ConstraintOperator::ConstraintOperator(const SdpProblem& problem) : problem_(&problem) {
  build_slack_pattern();
  build_gram();
}

void ConstraintOperator::build_slack_pattern() {
  const Index n = problem_->n();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * (problem_->stored_entries() + static_cast<Index>(problem_->cost().size()))));
  auto add = [&](const SymEntry& e) {
    triplets.emplace_back(e.row, e.col, 1.0);
    if (e.row != e.col) triplets.emplace_back(e.col, e.row, 1.0);
  };
  for (const auto& e : problem_->cost()) add(e);
  for (Index i = 0; i < problem_->m(); ++i)
    for (const auto& e : problem_->constraint(i)) add(e);
  pattern_.resize(n, n);
  pattern_.setFromTriplets(triplets.begin(), triplets.end());
  pattern_.makeCompressed();

  // Column-major compressed storage: locate (row, col) by scanning the column.
  auto slot = [&](Index row, Index col) {
    const Index begin = pattern_.outerIndexPtr()[col];
    const Index end = pattern_.outerIndexPtr()[col + 1];
    const auto* rows = pattern_.innerIndexPtr();
    const auto* it = std::lower_bound(rows + begin, rows + end, static_cast<SparseMatrix::StorageIndex>(row));
    return static_cast<Index>(it - rows);
  };
  auto slots = [&](const SymEntry& e) { return std::make_pair(slot(e.row, e.col), slot(e.col, e.row)); };

  cost_slots_.clear();
  for (const auto& e : problem_->cost()) cost_slots_.push_back(slots(e));
  constraint_slots_.clear();
  constraint_slots_.reserve(static_cast<std::size_t>(problem_->stored_entries()));
  for (Index i = 0; i < problem_->m(); ++i)
    for (const auto& e : problem_->constraint(i)) constraint_slots_.push_back(slots(e));
}

void ConstraintOperator::build_gram() {
  if (problem_->is_completion()) {
    gram_scale_ = 0.5;
    return;
  }
  const Index m = problem_->m();
  // Constraints sharing a coordinate contribute to the same Gram entries.
  std::map<std::pair<Index, Index>, std::vector<std::pair<Index, double>>> by_coord;
  for (Index i = 0; i < m; ++i)
    for (const auto& e : problem_->constraint(i)) by_coord[{e.row, e.col}].emplace_back(i, e.value);
  gram_dense_ = Matrix::Zero(m, m);
  for (const auto& [rc, list] : by_coord) {
    const double weight = rc.first == rc.second ? 1.0 : 2.0;
    for (const auto& [i, vi] : list)
      for (const auto& [j, vj] : list) gram_dense_(i, j) += weight * vi * vj;
  }
  Eigen::LLT<Matrix> llt(gram_dense_);
  double min_pivot = std::numeric_limits<double>::infinity();
  if (llt.info() == Eigen::Success) {
    const Matrix& L = llt.matrixLLT();
    for (Index i = 0; i < m; ++i) min_pivot = std::min(min_pivot, L(i, i) * L(i, i));
  }
  const double scale = gram_dense_.diagonal().maxCoeff();
  if (llt.info() != Eigen::Success || !(min_pivot > 1e-13 * scale)) {
    gram_singular_ = true;
    return;
  }
  gram_inverse_ = llt.solve(Matrix::Identity(m, m));
  gram_factor_ = std::move(llt);
}

Vector ConstraintOperator::apply_lowrank(const Matrix& U, double mu) const {
  require(U.rows() == n(), "apply_lowrank: U must have n rows");
  const Matrix Ut = U.transpose();
  Vector out(m());
  for (Index i = 0; i < m(); ++i) {
    double acc = 0.0;
    for (const auto& e : problem_->constraint(i)) {
      const double uu = Ut.col(e.row).dot(Ut.col(e.col));
      acc += e.row == e.col ? e.value * (mu + uu) : 2.0 * e.value * uu;
    }
    out(i) = acc;
  }
  return out;
}

Vector ConstraintOperator::apply(const Matrix& M) const {
  require(M.rows() == n() && M.cols() == n(), "apply: matrix must be n x n");
  Vector out(m());
  for (Index i = 0; i < m(); ++i) {
    double acc = 0.0;
    for (const auto& e : problem_->constraint(i)) {
      acc += e.row == e.col ? e.value * M(e.row, e.row) : e.value * (M(e.row, e.col) + M(e.col, e.row));
    }
    out(i) = acc;
  }
  return out;
}

Vector ConstraintOperator::apply_product(const Matrix& L, const Matrix& R) const {
  require(L.rows() == n() && R.rows() == n() && L.cols() == R.cols(),
          "apply_product: factors must be n x k with matching k");
  const Matrix Lt = L.transpose();
  const Matrix Rt = R.transpose();
  Vector out(m());
  for (Index i = 0; i < m(); ++i) {
    double acc = 0.0;
    for (const auto& e : problem_->constraint(i)) {
      if (e.row == e.col) {
        acc += e.value * Lt.col(e.row).dot(Rt.col(e.row));
      } else {
        acc += e.value * (Lt.col(e.row).dot(Rt.col(e.col)) + Lt.col(e.col).dot(Rt.col(e.row)));
      }
    }
    out(i) = acc;
  }
  return out;
}

Vector ConstraintOperator::apply_sparse(const SparseMatrix& M) const {
  require(M.rows() == n() && M.cols() == n() && M.nonZeros() == pattern_.nonZeros(),
          "apply_sparse: matrix must share the slack pattern");
  const double* values = M.valuePtr();
  Vector out(m());
  std::size_t k = 0;
  for (Index i = 0; i < m(); ++i) {
    double acc = 0.0;
    for (const auto& e : problem_->constraint(i)) {
      const auto [upper, lower] = constraint_slots_[k++];
      acc += upper == lower ? e.value * values[upper] : e.value * (values[upper] + values[lower]);
    }
    out(i) = acc;
  }
  return out;
}

SparseMatrix ConstraintOperator::adjoint(const Vector& w) const {
  require(w.size() == m(), "adjoint: w must have length m");
  SparseMatrix out = pattern_;
  double* values = out.valuePtr();
  std::fill(values, values + out.nonZeros(), 0.0);
  std::size_t k = 0;
  for (Index i = 0; i < m(); ++i) {
    for (const auto& e : problem_->constraint(i)) {
      const auto [upper, lower] = constraint_slots_[k++];
      values[upper] += w(i) * e.value;
      if (lower != upper) values[lower] += w(i) * e.value;
    }
  }
  return out;
}

Matrix ConstraintOperator::adjoint_times(const Vector& w, const Matrix& U) const {
  require(w.size() == m(), "adjoint_times: w must have length m");
  require(U.rows() == n(), "adjoint_times: U must have n rows");
  const Matrix Ut = U.transpose();
  Matrix outT = Matrix::Zero(U.cols(), n());
  for (Index i = 0; i < m(); ++i) {
    if (w(i) == 0.0) continue;
    for (const auto& e : problem_->constraint(i)) {
      const double c = w(i) * e.value;
      outT.col(e.row) += c * Ut.col(e.col);
      if (e.row != e.col) outT.col(e.col) += c * Ut.col(e.row);
    }
  }
  return outT.transpose();
}

SparseMatrix ConstraintOperator::slack(const Vector& y) const {
  SparseMatrix out = adjoint(y);
  double* values = out.valuePtr();
  for (Index k = 0; k < out.nonZeros(); ++k) values[k] = -values[k];
  const auto cost = problem_->cost();
  for (std::size_t k = 0; k < cost.size(); ++k) {
    const auto [upper, lower] = cost_slots_[k];
    values[upper] += cost[k].value;
    if (lower != upper) values[lower] += cost[k].value;
  }
  return out;
}

Vector ConstraintOperator::solve_gram(const Vector& d) const {
  require(d.size() == m(), "solve_gram: d must have length m");
  if (gram_scale_) return d / *gram_scale_;
  if (gram_singular_) {
    throw std::runtime_error("solve_gram: Gram matrix A A^T is singular; the " +
                             std::to_string(m()) + " constraint matrices are linearly dependent");
  }
  return gram_factor_->solve(d);
}

Matrix ConstraintOperator::gram() const {
  if (gram_scale_) return *gram_scale_ * Matrix::Identity(m(), m());
  return gram_dense_;
}

const Matrix& ConstraintOperator::gram_inverse() const {
  if (gram_scale_ || gram_singular_) {
    throw std::logic_error("gram_inverse: only available for independent general operators");
  }
  return gram_inverse_;
}

}  // namespace iplr
