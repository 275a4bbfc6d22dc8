#include "credsim/stats.hpp"

#include <cmath>

#include "credsim/error.hpp"

namespace credsim {

double t_quantile_975(std::int64_t df) {
  static constexpr double kTable[31] = {
      0.0,      // unused
      12.7062,  4.30265, 3.18245, 2.77645, 2.57058, 2.44691, 2.36462,
      2.30600,  2.26216, 2.22814, 2.20099, 2.17881, 2.16037, 2.14479,
      2.13145,  2.11991, 2.10982, 2.10092, 2.09302, 2.08596, 2.07961,
      2.07387,  2.06866, 2.06390, 2.05954, 2.05553, 2.05183, 2.04841,
      2.04523,  2.04227,
  };
  if (df < 1) throw ConfigError("t quantile needs df >= 1");
  if (df <= 30) return kTable[df];
  return 1.959964;
}

StatSummary summarize(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw ConfigError("summarize requires at least 2 samples");
  }
  StatAccum acc;
  for (double x : samples) acc.add(x);
  return summarize(acc);
}

StatSummary summarize(const StatAccum& acc) {
  if (acc.n < 2) throw ConfigError("summarize requires at least 2 samples");
  const double se = std::sqrt(acc.variance() / static_cast<double>(acc.n));
  return StatSummary{acc.mean, t_quantile_975(acc.n - 1) * se, acc.n};
}

}  // namespace credsim
