#include "iplr/linalg.hpp"

#include <Eigen/Cholesky>

#include <stdexcept>
#include <string>

namespace iplr {

Vector vec(const Matrix& M) { return Eigen::Map<const Vector>(M.data(), M.size()); }

Matrix mat(const Vector& v, Index rows, Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) {
    throw std::invalid_argument("mat: length " + std::to_string(v.size()) + " does not match " +
                                std::to_string(rows) + " x " + std::to_string(cols));
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Vector apply_transpose_perm(const Vector& v, Index n, Index r) {
  if (n < 0 || r < 0 || v.size() != n * r) {
    throw std::invalid_argument("apply_transpose_perm: length " + std::to_string(v.size()) +
                                " does not match " + std::to_string(n) + " x " + std::to_string(r));
  }
  Vector out(v.size());
  // v(i + j n) = B(i, j); out(j + i r) = B^T(j, i).
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < n; ++i) out(j + i * r) = v(i + j * n);
  return out;
}

std::optional<Matrix> try_cholesky(const Matrix& S) {
  if (S.rows() != S.cols()) throw std::invalid_argument("try_cholesky: matrix is not square");
  if (!S.allFinite()) throw std::domain_error("try_cholesky: non-finite entries");
  const Matrix sym = 0.5 * (S + S.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix L = llt.matrixL();
  for (Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0)) return std::nullopt;
  }
  return L;
}

}  // namespace iplr
