#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "credsim/event_queue.hpp"
#include "credsim/rng.hpp"
#include "credsim/time.hpp"

namespace credsim {

class Simulation;

enum class WorkloadKind {
  kCpuHog,
  kUserAttacker,
  kKernelAttacker,
  kWorkLoopAttacker,
  kPinger,
  kPonger,
  kScripted,
};

const char* to_string(WorkloadKind k);
WorkloadKind workload_kind_from_string(const std::string& s);

enum class JitterKind { kNone, kUniform, kGaussian };

// Applied to wake latency (clamped non-negative) and to detected spin
// length. kUniform draws from (-param, +param), kGaussian has sigma = param.
struct JitterSpec {
  JitterKind kind = JitterKind::kNone;
  double param_us = 0.0;
};

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kCpuHog;

  // Attackers: CPU time per burst before voluntarily halting.
  Micros spin = 9'000;
  // Requested sleep; the guest OS wakes the VM at the next guest-tick
  // boundary at or after now + sleep_request.
  Micros sleep_request = 500;
  Micros guest_tick = 1'000;

  // Work-loop attacker: the clock is read every check_granularity loop
  // iterations, loops_per_us of which fit in one microsecond, so the burst
  // overshoots by Uniform[0, check_granularity / loops_per_us) us.
  std::int64_t check_granularity = 10'000;
  double loops_per_us = 270.0;

  JitterSpec jitter;

  // Ping-pong pair: CPU consumed per message and pacing of sends; peer is
  // the partner VM index.
  Micros message_cost = 10;
  Micros ping_interval = 0;
  int peer = -1;

  // Delay before the workload first becomes runnable.
  Micros phase_offset = 0;

  // Scripted on/off schedule: awake [wake, block) intervals, strictly
  // increasing. Used by diagnostics and oracle tests.
  std::vector<std::pair<Micros, Micros>> script;

  void validate() const;  // throws ConfigError
};

// Behavior program of one VM. The simulation calls these hooks; programs
// drive the VM through timers, blocks, and wakes on the owning simulation.
class WorkloadProgram {
 public:
  virtual ~WorkloadProgram() = default;

  // True if the VM starts blocked rather than runnable.
  virtual bool starts_blocked() const { return false; }

  // Called once at t=0 before the first dispatch.
  virtual void start(Simulation& sim, int vm) { (void)sim, (void)vm; }

  // The VM was placed on a PCPU / taken off it while still runnable.
  virtual void on_dispatch(Simulation& sim, int vm) { (void)sim, (void)vm; }
  virtual void on_preempt(Simulation& sim, int vm, Micros ran) {
    (void)sim, (void)vm, (void)ran;
  }

  // A kVcpuYield or kWorkloadTimer event armed by this program fired.
  virtual void on_timer(Simulation& sim, int vm, EventKind kind) {
    (void)sim, (void)vm, (void)kind;
  }

  // The VM transitioned from BLOCKED to runnable.
  virtual void on_wake(Simulation& sim, int vm) { (void)sim, (void)vm; }
};

std::unique_ptr<WorkloadProgram> make_program(const WorkloadSpec& spec);

// Jitter draw in microseconds; may be negative.
double draw_jitter(Rng& rng, const JitterSpec& jitter);

}  // namespace credsim
