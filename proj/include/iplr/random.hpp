#pragma once

#include <cstdint>
#include <random>

namespace iplr {

/// Portable random source used by every generator in the library.
///
/// Algorithm "iplr-rng/1": std::mt19937_64 seeded with the user seed.
/// Uniform doubles take the top 53 bits of one draw; standard normals use the
/// cosine branch of Box-Muller on two uniforms in (0, 1]. Bounded integers use
/// rejection sampling on the raw 64-bit stream. None of this depends on the
/// standard library's distribution classes, whose output is
/// implementation-defined, so a seed reproduces the same instance everywhere.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "iplr-rng/1 (mt19937_64, box-muller)";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in (0, 1].
  double uniform();

  double normal();

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace iplr
