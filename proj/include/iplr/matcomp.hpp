#pragma once

#include "iplr/problem.hpp"

namespace iplr {

/// ||X - B||_F / ||B||_F. Throws on shape mismatch or B = 0.
double relative_error(const Matrix& X, const Matrix& B);

/// ||X - B||_F / nhat for square nhat x nhat inputs. Note the divisor is
/// nhat, not the entry count.
double rmse(const Matrix& X, const Matrix& B);

/// Reference RMSE eta sqrt((nhat r - r^2) / m) of an oracle that knows the
/// column space.
double oracle_rmse(double eta, Index nhat, Index rank, Index m);

inline constexpr double kPsnrCap = 999.0;

/// 10 log10(peak^2 nhat^2 / ||X - B||_F^2); kPsnrCap when X == B.
double psnr(const Matrix& X, const Matrix& B, double peak = 255.0);

/// Number of singular values above rel_tol * sigma_1.
Index numerical_rank(const Matrix& A, double rel_tol = 1e-8);

}  // namespace iplr
