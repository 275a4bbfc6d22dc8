#pragma once

#include <cstdint>
#include <span>

namespace credsim {

// Streaming mean/variance accumulator (Welford).
struct StatAccum {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  double variance() const {  // sample variance
    return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  }
};

struct StatSummary {
  double mean = 0.0;
  double half_width = 0.0;  // 95% confidence interval half-width
  std::int64_t n = 0;
};

// Two-sided 0.975 Student-t quantile; exact table for df <= 30, normal
// quantile beyond that.
double t_quantile_975(std::int64_t df);

// Mean and 95% CI half-width. Requires at least two samples.
StatSummary summarize(std::span<const double> samples);
StatSummary summarize(const StatAccum& acc);

}  // namespace credsim
