#include "iplr/matcomp.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iplr {

namespace {

void same_shape(const Matrix& X, const Matrix& B, const char* who) {
  if (X.rows() != B.rows() || X.cols() != B.cols()) {
    throw std::invalid_argument(std::string(who) + ": shape mismatch");
  }
}

}  // namespace

double relative_error(const Matrix& X, const Matrix& B) {
  same_shape(X, B, "relative_error");
  const double nb = B.norm();
  if (nb == 0.0) throw std::invalid_argument("relative_error: reference matrix is zero");
  return (X - B).norm() / nb;
}

double rmse(const Matrix& X, const Matrix& B) {
  same_shape(X, B, "rmse");
  if (B.rows() != B.cols()) throw std::invalid_argument("rmse: matrices must be square");
  if (B.rows() == 0) throw std::invalid_argument("rmse: empty matrices");
  return (X - B).norm() / static_cast<double>(B.rows());
}

double oracle_rmse(double eta, Index nhat, Index rank, Index m) {
  if (m <= 0) throw std::invalid_argument("oracle_rmse: m must be positive");
  const double dof = static_cast<double>(nhat * rank - rank * rank);
  return eta * std::sqrt(dof / static_cast<double>(m));
}

double psnr(const Matrix& X, const Matrix& B, double peak) {
  same_shape(X, B, "psnr");
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
  const double err2 = (X - B).squaredNorm();
  if (err2 == 0.0) return kPsnrCap;
  const double nhat = static_cast<double>(B.rows());
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak * nhat * nhat / err2));
}

Index numerical_rank(const Matrix& A, double rel_tol) {
  if (A.size() == 0) return 0;
  const Vector s = Eigen::BDCSVD<Matrix>(A).singularValues();
  if (s(0) == 0.0) return 0;
  return static_cast<Index>((s.array() > rel_tol * s(0)).count());
}

}  // namespace iplr
