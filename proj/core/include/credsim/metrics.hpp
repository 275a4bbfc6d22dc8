#pragma once

#include <cstdint>
#include <vector>

#include "credsim/time.hpp"

namespace credsim {

// Per-VM usage over the measurement window of one run.
struct VmUsage {
  Micros scheduled = 0;
  std::int64_t charged_credits = 0;
  std::int64_t debit_events = 0;
  std::int64_t boost_wakes = 0;
};

struct UsageLedger {
  std::vector<VmUsage> vms;
  Micros idle = 0;    // summed over PCPUs
  Micros window = 0;  // horizon - warmup
  int pcpus = 0;
};

// Fraction of one PCPU obtained by the VM over the window.
double cpu_share(const UsageLedger& ledger, int vm);

// Work rate relative to a solo baseline, in percent. The abstract work
// model accrues one unit per scheduled microsecond, so a solo CPU hog has
// rate 1.0.
double percent_of_baseline(const UsageLedger& ledger, int vm,
                           double baseline_rate = 1.0);

// Charged minus actually scheduled time; negative means undercharged.
Micros charge_bias_us(const UsageLedger& ledger, int vm);

}  // namespace credsim
