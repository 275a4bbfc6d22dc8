#include "credsim/rng.hpp"

#include <cmath>

#include "credsim/error.hpp"

namespace credsim {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t Rng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream) {
  Rng r(0);
  r.state_ = mix(seed) ^ mix(kGolden * (stream + 1));
  return r;
}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return mix(state_);
}

double Rng::next_unit_open() {
  // 53-bit mantissa shifted into (0,1): (k + 0.5) / 2^53 for k in [0, 2^53).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::int64_t Rng::next_below(std::int64_t n) {
  if (n <= 0) throw SimError("Rng::next_below: bound must be positive");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (-bound) % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= threshold) return static_cast<std::int64_t>(x % bound);
  }
}

double Rng::next_gaussian(double sigma) {
  const double u1 = next_unit_open();
  const double u2 = next_unit_open();
  return sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace credsim
