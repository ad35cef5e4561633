#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iplr {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One stored coordinate of a symmetric matrix. Only the upper triangle is
/// kept (row <= col); an off-diagonal entry stands for both (row, col) and
/// (col, row).
struct SymEntry {
  Index row;
  Index col;
  double value;
};

/// Observed entry of a matrix to be completed, 0-based.
struct ObservedEntry {
  Index s;
  Index t;
  double value;
};

struct IndexPair {
  Index s;
  Index t;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// Standard-form SDP data: min C.X s.t. A_i.X = b_i, X psd.
///
/// Constraint matrices are held in a flat row-pointer layout of upper-triangle
/// coordinates regardless of the source. Problems built from matrix-completion
/// data additionally remember n-hat and the observed index pairs so that
/// callers can take the closed-form paths (A A^T = I/2, A(I) = 0).
class SdpProblem {
 public:
  /// General problem. Each constraint is given as upper-triangle coordinates;
  /// duplicate coordinates within a constraint are summed.
  static SdpProblem general(Index n, const std::vector<std::vector<SymEntry>>& constraints,
                            const std::vector<SymEntry>& cost, Vector b);

  Index n() const { return n_; }
  Index m() const { return static_cast<Index>(b_.size()); }
  const Vector& b() const { return b_; }
  std::span<const SymEntry> cost() const { return cost_; }

  /// Upper-triangle coordinates of A_i.
  std::span<const SymEntry> constraint(Index i) const {
    return std::span<const SymEntry>(entries_).subspan(
        static_cast<std::size_t>(ptr_[static_cast<std::size_t>(i)]),
        static_cast<std::size_t>(ptr_[static_cast<std::size_t>(i) + 1] -
                                 ptr_[static_cast<std::size_t>(i)]));
  }
  /// Total stored coordinates over all constraints.
  Index stored_entries() const { return static_cast<Index>(entries_.size()); }

  bool is_completion() const { return nhat_.has_value(); }
  /// Side length of the completed matrix; only for completion problems.
  Index nhat() const;
  /// Observed pairs in constraint order; empty for general problems.
  const std::vector<IndexPair>& omega() const { return omega_; }

  /// Same operator and cost with a different right-hand side.
  SdpProblem with_rhs(Vector b) const;

 private:
  friend SdpProblem build_mc_problem(std::span<const ObservedEntry>, Index);
  SdpProblem() = default;

  Index n_ = 0;
  std::vector<Index> ptr_;
  std::vector<SymEntry> entries_;
  std::vector<SymEntry> cost_;
  Vector b_;
  std::optional<Index> nhat_;
  std::vector<IndexPair> omega_;
};

/// SDP reformulation of nuclear-norm matrix completion: n = 2*nhat,
/// C = I/2, and constraint i picks the (s_i, t_i) entry of the off-diagonal
/// block of X. Indices are 0-based; throws on duplicates, out-of-range pairs,
/// or an empty entry list.
SdpProblem build_mc_problem(std::span<const ObservedEntry> entries, Index nhat);

/// X = mu I + U U^T, held implicitly.
struct LowRankPrimal {
  Matrix U;
  double mu = 1.0;

  Index rank() const { return U.cols(); }
};

/// Dual multipliers. The slack S = C - A^T y is never stored; chol holds the
/// lower Cholesky factor of S when S is known to be positive definite.
struct DualState {
  Vector y;
  std::optional<Matrix> chol;
};

struct GroundTruth {
  Matrix B;
  Index rank = 0;
  std::string generator;
  std::uint64_t seed = 0;
  double kappa = 1.0;
  double xi = 0.0;
};

/// B = B_L B_R with iid standard normal factors (nhat x r and r x nhat).
GroundTruth generate_random_lowrank(Index nhat, Index rank, std::uint64_t seed);

/// B = Q diag(s) V^T with Q, V the leading singular vectors of a Gaussian
/// matrix and s equally spaced from nhat down to nhat / kappa.
GroundTruth generate_conditioned(Index nhat, Index rank, double kappa, std::uint64_t seed);

/// Adds xi * N(0,1) to every singular value of B (including the zero ones)
/// and rebuilds the matrix from its full SVD.
GroundTruth perturb_singular_values(const GroundTruth& truth, double xi, std::uint64_t seed);

/// m = round((0.01 nhat + 4) r (2 nhat - r)).
Index default_sample_count(Index nhat, Index rank);

/// m distinct pairs drawn uniformly without replacement from nhat x nhat,
/// returned in column-major order.
std::vector<IndexPair> sample_omega(Index nhat, Index m, std::uint64_t seed);

/// b + eta g with g iid standard normal.
Vector add_noise(const Vector& b, double eta, std::uint64_t seed);

/// Observed entries of B on omega, in omega order.
std::vector<ObservedEntry> observe(const Matrix& B, const std::vector<IndexPair>& omega);

/// Off-diagonal block U_top U_bot^T of mu I + U U^T; the mu I term never
/// reaches it.
Matrix extract_recovered(const LowRankPrimal& primal, Index nhat);

}  // namespace iplr
