#include "iplr/problem.hpp"

#include "iplr/random.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace iplr {

namespace {

// Merges duplicate coordinates and moves everything into the upper triangle.
std::vector<SymEntry> canonicalize(Index n, const std::vector<SymEntry>& in) {
  std::map<std::pair<Index, Index>, double> acc;
  for (const auto& e : in) {
    if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) {
      throw std::invalid_argument("symmetric entry (" + std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ") outside " + std::to_string(n) +
                                  " x " + std::to_string(n));
    }
    acc[{std::min(e.row, e.col), std::max(e.row, e.col)}] += e.value;
  }
  std::vector<SymEntry> out;
  out.reserve(acc.size());
  for (const auto& [rc, v] : acc) {
    if (v != 0.0) out.push_back({rc.first, rc.second, v});
  }
  return out;
}

}  // namespace

SdpProblem SdpProblem::general(Index n, const std::vector<std::vector<SymEntry>>& constraints,
                               const std::vector<SymEntry>& cost, Vector b) {
  if (n <= 0) throw std::invalid_argument("SdpProblem: n must be positive");
  if (constraints.empty()) throw std::invalid_argument("SdpProblem: at least one constraint");
  if (static_cast<Index>(constraints.size()) != b.size()) {
    throw std::invalid_argument("SdpProblem: " + std::to_string(constraints.size()) +
                                " constraints but b has length " + std::to_string(b.size()));
  }
  SdpProblem p;
  p.n_ = n;
  p.ptr_.reserve(constraints.size() + 1);
  p.ptr_.push_back(0);
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    auto entries = canonicalize(n, constraints[i]);
    if (entries.empty()) {
      throw std::invalid_argument("SdpProblem: constraint " + std::to_string(i) + " is zero");
    }
    p.entries_.insert(p.entries_.end(), entries.begin(), entries.end());
    p.ptr_.push_back(static_cast<Index>(p.entries_.size()));
  }
  p.cost_ = canonicalize(n, cost);
  p.b_ = std::move(b);
  return p;
}

Index SdpProblem::nhat() const {
  if (!nhat_) throw std::logic_error("SdpProblem::nhat: not a matrix-completion problem");
  return *nhat_;
}

SdpProblem SdpProblem::with_rhs(Vector b) const {
  if (b.size() != m()) throw std::invalid_argument("SdpProblem::with_rhs: length mismatch");
  SdpProblem p = *this;
  p.b_ = std::move(b);
  return p;
}

SdpProblem build_mc_problem(std::span<const ObservedEntry> entries, Index nhat) {
  if (nhat <= 0) throw std::invalid_argument("build_mc_problem: nhat must be positive");
  if (entries.empty()) throw std::invalid_argument("build_mc_problem: no observed entries (m = 0)");

  SdpProblem p;
  p.n_ = 2 * nhat;
  p.nhat_ = nhat;
  p.b_.resize(static_cast<Index>(entries.size()));
  p.omega_.reserve(entries.size());
  p.entries_.reserve(entries.size());
  p.ptr_.reserve(entries.size() + 1);
  p.ptr_.push_back(0);

  std::unordered_set<Index> seen;
  seen.reserve(entries.size() * 2);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.s < 0 || e.t < 0 || e.s >= nhat || e.t >= nhat) {
      throw std::invalid_argument("build_mc_problem: entry " + std::to_string(i + 1) + " index (" +
                                  std::to_string(e.s + 1) + ", " + std::to_string(e.t + 1) +
                                  ") outside 1.." + std::to_string(nhat));
    }
    if (!seen.insert(e.s + e.t * nhat).second) {
      throw std::invalid_argument("build_mc_problem: duplicate pair (" + std::to_string(e.s + 1) +
                                  ", " + std::to_string(e.t + 1) + ") at entry " +
                                  std::to_string(i + 1));
    }
    p.omega_.push_back({e.s, e.t});
    p.entries_.push_back({e.s, nhat + e.t, 0.5});
    p.ptr_.push_back(static_cast<Index>(p.entries_.size()));
    p.b_(static_cast<Index>(i)) = e.value;
  }

  p.cost_.reserve(static_cast<std::size_t>(p.n_));
  for (Index j = 0; j < p.n_; ++j) p.cost_.push_back({j, j, 0.5});
  return p;
}

namespace {

Matrix gaussian(Index rows, Index cols, Rng& rng) {
  Matrix M(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) M(i, j) = rng.normal();
  return M;
}

}  // namespace

GroundTruth generate_random_lowrank(Index nhat, Index rank, std::uint64_t seed) {
  if (rank < 1 || rank > nhat) {
    throw std::invalid_argument("generate_random_lowrank: need 1 <= rank <= nhat");
  }
  Rng rng(seed);
  const Matrix left = gaussian(nhat, rank, rng);
  const Matrix right = gaussian(rank, nhat, rng);
  return {left * right, rank, "random-lowrank", seed, 1.0, 0.0};
}

GroundTruth generate_conditioned(Index nhat, Index rank, double kappa, std::uint64_t seed) {
  if (!(kappa >= 1.0)) throw std::invalid_argument("generate_conditioned: kappa must be >= 1");
  if (rank < 1 || rank > nhat) {
    throw std::invalid_argument("generate_conditioned: need 1 <= rank <= nhat");
  }
  if (rank == 1 && kappa != 1.0) {
    throw std::invalid_argument("generate_conditioned: rank 1 cannot have condition number != 1");
  }
  Rng rng(seed);
  const Matrix G = gaussian(nhat, nhat, rng);
  Eigen::BDCSVD<Matrix> svd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double top = static_cast<double>(nhat);
  const double bottom = top / kappa;
  Vector sigma(rank);
  for (Index i = 0; i < rank; ++i) {
    sigma(i) = rank == 1 ? top : top + (bottom - top) * static_cast<double>(i) / static_cast<double>(rank - 1);
  }
  Matrix B = svd.matrixU().leftCols(rank) * sigma.asDiagonal() *
             svd.matrixV().leftCols(rank).transpose();
  return {std::move(B), rank, "conditioned", seed, kappa, 0.0};
}

GroundTruth perturb_singular_values(const GroundTruth& truth, double xi, std::uint64_t seed) {
  if (!(xi >= 0.0)) throw std::invalid_argument("perturb_singular_values: xi must be >= 0");
  GroundTruth out = truth;
  out.xi = xi;
  out.generator = truth.generator + "+perturbed";
  if (xi == 0.0) return out;
  Rng rng(seed);
  Eigen::BDCSVD<Matrix> svd(truth.B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector sigma = svd.singularValues();
  for (Index i = 0; i < sigma.size(); ++i) sigma(i) += xi * rng.normal();
  out.B = svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();
  out.rank = truth.B.rows();
  return out;
}

Index default_sample_count(Index nhat, Index rank) {
  const double c = 0.01 * static_cast<double>(nhat) + 4.0;
  return static_cast<Index>(std::llround(c * static_cast<double>(rank) *
                                         static_cast<double>(2 * nhat - rank)));
}

std::vector<IndexPair> sample_omega(Index nhat, Index m, std::uint64_t seed) {
  const Index total = nhat * nhat;
  if (nhat <= 0) throw std::invalid_argument("sample_omega: nhat must be positive");
  if (m < 0 || m > total) {
    throw std::invalid_argument("sample_omega: m = " + std::to_string(m) + " exceeds nhat^2 = " +
                                std::to_string(total));
  }
  // Partial Fisher-Yates over the virtual array 0..total-1; only displaced
  // slots are materialized.
  Rng rng(seed);
  std::unordered_map<Index, Index> swapped;
  std::vector<Index> picked;
  picked.reserve(static_cast<std::size_t>(m));
  auto slot = [&](Index i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  for (Index i = 0; i < m; ++i) {
    const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(total - i)));
    const Index vi = slot(i);
    const Index vj = slot(j);
    swapped[j] = vi;
    picked.push_back(vj);
  }
  std::sort(picked.begin(), picked.end());
  std::vector<IndexPair> omega;
  omega.reserve(picked.size());
  for (Index code : picked) omega.push_back({code % nhat, code / nhat});
  return omega;
}

Vector add_noise(const Vector& b, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0)) throw std::invalid_argument("add_noise: eta must be >= 0");
  if (eta == 0.0) return b;
  Rng rng(seed);
  Vector out = b;
  for (Index i = 0; i < out.size(); ++i) out(i) += eta * rng.normal();
  return out;
}

std::vector<ObservedEntry> observe(const Matrix& B, const std::vector<IndexPair>& omega) {
  std::vector<ObservedEntry> out;
  out.reserve(omega.size());
  for (const auto& p : omega) out.push_back({p.s, p.t, B(p.s, p.t)});
  return out;
}

Matrix extract_recovered(const LowRankPrimal& primal, Index nhat) {
  const Index rows = primal.U.rows();
  if (rows % 2 != 0) {
    throw std::invalid_argument("extract_recovered: U has odd row count " + std::to_string(rows));
  }
  if (rows != 2 * nhat) {
    throw std::invalid_argument("extract_recovered: U has " + std::to_string(rows) +
                                " rows, expected " + std::to_string(2 * nhat));
  }
  return primal.U.topRows(nhat) * primal.U.bottomRows(nhat).transpose();
}

}  // namespace iplr
