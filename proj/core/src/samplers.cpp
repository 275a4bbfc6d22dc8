#include "credsim/samplers.hpp"

#include <cmath>

#include "credsim/error.hpp"

namespace credsim {

Micros trunc_exp_from_unit(double u, double mean_us, Micros max_us) {
  if (mean_us <= 0 || max_us <= 0) {
    throw SimError("trunc_exp: mean and max must be positive");
  }
  const double x = -mean_us * std::log(u);
  if (x >= static_cast<double>(max_us)) return max_us;
  const Micros q = static_cast<Micros>(x);  // floor; x >= 0
  return q < 1 ? 1 : q;
}

Micros sample_trunc_exp(Rng& rng, double mean_us, Micros max_us) {
  return trunc_exp_from_unit(rng.next_unit_open(), mean_us, max_us);
}

std::int64_t sample_geometric_slots(Rng& rng, double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw SimError("geometric: p must be in (0,1]");
  }
  if (p == 1.0) return 1;
  const double u = rng.next_unit_open();
  const std::int64_t k =
      1 + static_cast<std::int64_t>(std::log(u) / std::log1p(-p));
  return k < 1 ? 1 : k;
}

}  // namespace credsim
