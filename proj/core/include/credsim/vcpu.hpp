#pragma once

#include <cstdint>
#include <memory>

#include "credsim/time.hpp"
#include "credsim/workload.hpp"

namespace credsim {

enum class Priority : std::uint8_t { kBoost = 0, kUnder, kOver, kBlocked };

const char* to_string(Priority prio);

// Dispatch preference: lower rank runs first. Blocked VCPUs never dispatch.
constexpr int band_rank(Priority p) { return static_cast<int>(p); }

struct VcpuState {
  int id = -1;
  int pcpu = 0;
  std::int64_t credits = 0;
  Priority prio = Priority::kUnder;
  // Entitlement as a fraction of one PCPU; drives the periodic refill.
  double weight_share = 0.0;
  // Sub-credit carry for the exact-charging variant.
  Micros exact_remainder = 0;

  // Usage ledger (whole run; the report window subtracts a warmup snapshot).
  Micros scheduled = 0;
  std::int64_t charged_credits = 0;
  std::int64_t debit_events = 0;
  std::int64_t boost_wakes = 0;

  WorkloadKind kind = WorkloadKind::kCpuHog;
  std::unique_ptr<WorkloadProgram> program;
};

}  // namespace credsim
