#pragma once

#include "anchorsim/common/bytes.hpp"

#include <cstdint>
#include <random>

namespace anchorsim {

/// Seeded generator with hand-rolled distributions.
///
/// The standard library's distribution objects are implementation defined,
/// so every sampler here is written against the raw 64-bit engine output to
/// keep (scenario, seed) -> output bit-identical across toolchains.
class Rng
{
public:
  explicit Rng(std::uint64_t seed);

  /// Independent sub-stream; the same (seed, stream) always yields the same sequence.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);
  bool          bernoulli(double p) { return uniform() < p; }
  double        exponential(double rate);
  double        normal(double mean, double stddev);
  double        gamma(double shape, double scale = 1.0);
  double        chi_square(double dof) { return gamma(0.5 * dof, 2.0); }
  Bytes         bytes(std::size_t n);

  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t   seed_;
  std::mt19937_64 engine_;
};

/// splitmix64 finaliser, used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace anchorsim
