#pragma once

#include <string>

#include "credsim/time.hpp"

namespace credsim {

// Charging variant. Credit is the classic sampled token-bucket scheduler;
// the other four replace its fixed-period debit sample with charging schemes
// that cannot be dodged by sleeping through the sample point.
enum class Variant { kCredit, kExact, kPoisson, kBernoulli, kUniform };

enum class SchedMode { kWorkConserving, kNonWorkConserving };

const char* to_string(Variant v);
const char* to_string(SchedMode m);
Variant variant_from_string(const std::string& s);
SchedMode mode_from_string(const std::string& s);

struct SchedulerConfig {
  Variant variant = Variant::kCredit;
  SchedMode mode = SchedMode::kWorkConserving;
  // Per-VM entitlement as percent of one PCPU; required in NWC mode.
  double cap_percent = 0.0;

  Micros fast_tick = 10'000;
  Micros reschedule_tick = 30'000;
  std::int64_t debit_per_sample = 100;
  std::int64_t max_credits = 300;

  Micros bernoulli_slot = 1'000;
  double bernoulli_p = 0.1;
  Micros uniform_quantum = 1'000;

  // Diagnostic switch: with boost disabled, woken VCPUs enter UNDER/OVER
  // and never preempt; they wait on the queue for the next scheduling
  // point.
  bool boost_enabled = true;

  void validate() const;  // throws ConfigError
};

}  // namespace credsim
