#pragma once

#include <cstdint>

namespace credsim {

// Deterministic counter-based generator (splitmix64). The same seed yields a
// bit-identical draw sequence on every build, and substreams derived from
// (seed, stream) are independent, so each scenario replica gets its own
// stream without coordination.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double next_unit_open();

  // Uniform on {0, 1, ..., n-1}; n must be positive. Unbiased (rejection).
  std::int64_t next_below(std::int64_t n);

  // Gaussian with mean 0 and the given standard deviation (Box-Muller).
  double next_gaussian(double sigma);

 private:
  static std::uint64_t mix(std::uint64_t z);
  std::uint64_t state_;
};

}  // namespace credsim
