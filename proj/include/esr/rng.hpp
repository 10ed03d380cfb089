#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "esr/core.hpp"

namespace esr {

/// Seeded pseudo-random stream.
///
/// The engine is std::mt19937_64, whose state-update rule is fixed by the C++
/// standard, so a seed produces the same 64-bit stream on every conforming
/// platform. The distribution transforms are implemented here rather than taken
/// from <random> (whose distributions are implementation-defined):
///
///   uniform()  = ((u >> 11) + 0.5) * 2^-53          in the open interval (0, 1)
///   normal()   = sqrt(-2 ln u1) * cos(2 pi u2)     Box-Muller, one draw per call
///   index(n)   = rejection-sampled u mod n          unbiased
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double low, double high) { return low + (high - low) * uniform(); }
  double normal();
  Vector normal_vector(Index n);
  Matrix normal_matrix(Index rows, Index cols);
  std::uint64_t index(std::uint64_t n);

  /// m distinct indices from [0, n), sorted ascending (partial Fisher-Yates).
  std::vector<Index> sample_without_replacement(Index n, Index m);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace esr
