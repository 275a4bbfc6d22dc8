#pragma once

#include <compare>
#include <cstdint>

namespace credsim {

// All simulation time is integer microseconds of virtual time.
using Micros = std::int64_t;

// One scheduling credit is worth 100 us of CPU time.
inline constexpr Micros kCreditUs = 100;

// A point on the simulation clock.
struct VirtualTime {
  Micros us = 0;
  friend constexpr auto operator<=>(VirtualTime, VirtualTime) = default;
};

constexpr VirtualTime operator+(VirtualTime t, Micros d) { return {t.us + d}; }
constexpr VirtualTime operator-(VirtualTime t, Micros d) { return {t.us - d}; }
constexpr Micros operator-(VirtualTime a, VirtualTime b) { return a.us - b.us; }

// Smallest multiple of step that is >= t. step must be positive.
constexpr VirtualTime ceil_to(VirtualTime t, Micros step) {
  const Micros r = t.us % step;
  return r == 0 ? t : VirtualTime{t.us - r + step};
}

}  // namespace credsim
