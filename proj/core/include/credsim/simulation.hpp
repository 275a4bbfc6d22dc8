#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "credsim/config.hpp"
#include "credsim/event_queue.hpp"
#include "credsim/metrics.hpp"
#include "credsim/rng.hpp"
#include "credsim/run_queue.hpp"
#include "credsim/stats.hpp"
#include "credsim/vcpu.hpp"
#include "credsim/workload.hpp"

namespace credsim {

struct VmSetup {
  WorkloadSpec spec;
  int pcpu = 0;
};

// Test seams. Fixed offset/sample schedules replace the random draws so
// charging behavior can be checked against hand-walked oracles.
struct TestHooks {
  bool record_trace = false;
  bool validate_invariants = false;
  std::vector<Micros> uniform_offsets;   // consumed per window roll
  std::vector<Micros> sample_times;      // absolute sample arrival times
};

struct SamplerStats {
  std::int64_t samples = 0;
  std::int64_t intervals = 0;
  Micros interval_sum = 0;
};

struct PcpuState {
  int running = -1;           // VCPU id or -1 when idle
  VirtualTime seg_start{};    // start of the current running/idle segment
  Micros idle = 0;            // closed idle time
  RunQueue queue;

  // Exact variant: last charge boundary of the current runner.
  VirtualTime running_since{};

  // Bernoulli variant: slot index of the last scheduled sample.
  std::int64_t slot_cursor = 0;

  // Poisson variant: the pending arrival hit the truncation bound and only
  // re-arms the timer without charging. Chaining bounded timeouts this way
  // keeps the inter-charge process exactly exponential (constant hazard),
  // which charging must have to stay unbiased against schedules that adapt
  // to past samples.
  bool sample_is_rearm = false;

  // Uniform variant: current sampling window.
  VirtualTime window_start{};
  Micros window_offset = 0;
  bool window_pending = false;
};

// One self-contained, single-threaded simulation instance. Distinct
// instances share no mutable state and may run on different threads.
class Simulation {
 public:
  Simulation(SchedulerConfig cfg, std::vector<VmSetup> setups, int pcpus,
             Rng rng, TestHooks hooks = {});

  // Dispatches all events through `horizon` microseconds of virtual time.
  // Statistics reported by usage() cover (warmup, horizon].
  void run(Micros horizon, Micros warmup = 0);

  // Dispatches events up to t and stops, leaving run segments open so the
  // live scheduler state (running VCPUs, queues, credits) can be inspected.
  // Diagnostic entry point; not part of a normal run() lifecycle.
  void advance_to(Micros t) { run_until(VirtualTime{t}); }

  // --- services used by workload programs ---
  VirtualTime now() const { return queue_.now(); }
  Rng& rng() { return rng_; }
  const SchedulerConfig& config() const { return cfg_; }
  const WorkloadSpec& spec(int vm) const { return specs_[vm]; }

  EventHandle arm_timer(int vm, VirtualTime at, EventKind kind);
  void cancel_timer(EventHandle& handle);
  void wake_vcpu_at(int vm, VirtualTime at);
  void wake_vcpu(int vm) { wake_vcpu_at(vm, now()); }
  void block_running(int vm);  // vm must be the running VCPU of its PCPU
  void block_vcpu(int vm);     // vm may be running or queued
  void record_rtt(int vm, Micros rtt);

  // --- results ---
  const UsageLedger& usage() const;  // valid after run()
  const StatAccum& rtt_stats(int vm) const { return rtt_[vm]; }
  std::uint64_t trace_hash() const { return trace_hash_; }
  const std::vector<Event>& trace() const { return trace_; }
  const std::array<std::int64_t, kEventKindCount>& event_counts() const {
    return event_counts_;
  }
  const SamplerStats& sampler_stats() const { return sampler_; }

  // --- introspection (tests, diagnostics) ---
  int pcpu_count() const { return static_cast<int>(pcpus_.size()); }
  int vm_count() const { return static_cast<int>(vcpus_.size()); }
  const VcpuState& vcpu(int vm) const { return vcpus_[vm]; }
  const PcpuState& pcpu(int p) const { return pcpus_[p]; }
  void debug_set_credits(int vm, std::int64_t credits);

 private:
  enum class StopKind { kBlock, kPreempt, kFinal };

  bool work_conserving() const {
    return cfg_.mode == SchedMode::kWorkConserving;
  }

  void run_until(VirtualTime t);
  void handle(const Event& ev);

  // tick machinery
  void arm_fast_chain(VirtualTime from);
  void fast_phase(VirtualTime t);
  void do_refill(VirtualTime t);
  void do_round_robin(VirtualTime t);

  // randomized samplers
  void arm_sample(int pcpu);
  void handle_sample(int pcpu, VirtualTime t);
  void roll_window(int pcpu, VirtualTime t);
  void window_check_switch(int pcpu, VirtualTime t);
  void window_check_tick(int pcpu, VirtualTime t);
  Micros draw_window_offset();

  // scheduling core
  void enqueue(int vm);
  void start_running(int pcpu, int vm, VirtualTime t);
  void stop_running(int pcpu, VirtualTime t, StopKind kind);
  void maybe_reschedule(int pcpu, VirtualTime t);
  void apply_debit(int vm, std::int64_t amount);
  void exact_charge_running(int pcpu, VirtualTime t);
  void handle_wake(int vm, VirtualTime t);
  void finalize(VirtualTime t);
  void validate_state() const;

  VmUsage live_usage(int vm) const;
  Micros live_idle_total() const;

  SchedulerConfig cfg_;
  TestHooks hooks_;
  Rng rng_;
  EventQueue queue_;
  std::vector<WorkloadSpec> specs_;
  std::vector<VcpuState> vcpus_;
  std::vector<PcpuState> pcpus_;
  double poisson_mean_us_ = 0.0;
  Micros poisson_max_us_ = 0;
  std::size_t scripted_sample_idx_ = 0;
  std::size_t scripted_offset_idx_ = 0;

  Micros warmup_us_ = 0;
  std::vector<StatAccum> rtt_;
  std::uint64_t trace_hash_ = 1469598103934665603ULL;  // FNV offset basis
  std::vector<Event> trace_;
  std::array<std::int64_t, kEventKindCount> event_counts_{};
  SamplerStats sampler_;

  std::optional<UsageLedger> result_;
  std::vector<VmUsage> snapshot_;
  Micros snapshot_idle_ = 0;
};

}  // namespace credsim
