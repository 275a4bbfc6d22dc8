#pragma once

#include <cstdint>

#include "credsim/rng.hpp"
#include "credsim/time.hpp"

namespace credsim {

// Inverse-CDF step for the truncated exponential: min(-mean*ln(u), max),
// quantized down to whole microseconds (never below 1us). u in (0,1).
Micros trunc_exp_from_unit(double u, double mean_us, Micros max_us);

// Draws an inter-arrival time from the truncated exponential distribution.
// mean_us is the mean of the untruncated exponential.
Micros sample_trunc_exp(Rng& rng, double mean_us, Micros max_us);

// Number of slots until the next Bernoulli(p) success, inclusive: returns
// k >= 1 with P(k) = (1-p)^(k-1) * p.
std::int64_t sample_geometric_slots(Rng& rng, double p);

}  // namespace credsim
