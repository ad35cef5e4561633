#pragma once

#include "iplr/problem.hpp"

#include <optional>

namespace iplr {

/// Column-major stacking of M.
Vector vec(const Matrix& M);

/// Inverse of vec: reshapes a length rows*cols vector column by column.
Matrix mat(const Vector& v, Index rows, Index cols);

/// vec(mat(v, n, r)^T), i.e. the action of the transpose permutation
/// Pi_{nr}. Applying it with (r, n) undoes it.
Vector apply_transpose_perm(const Vector& v, Index n, Index r);

/// Lower Cholesky factor of (S + S^T) / 2, or nullopt when a pivot is not
/// strictly positive. Throws std::domain_error on NaN or Inf input.
std::optional<Matrix> try_cholesky(const Matrix& S);

}  // namespace iplr
