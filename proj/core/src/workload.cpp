#include "credsim/workload.hpp"

#include <algorithm>
#include <cmath>

#include "credsim/error.hpp"
#include "credsim/simulation.hpp"

namespace credsim {

const char* to_string(WorkloadKind k) {
  switch (k) {
    case WorkloadKind::kCpuHog: return "cpu-hog";
    case WorkloadKind::kUserAttacker: return "user-attacker";
    case WorkloadKind::kKernelAttacker: return "kernel-attacker";
    case WorkloadKind::kWorkLoopAttacker: return "workloop-attacker";
    case WorkloadKind::kPinger: return "pinger";
    case WorkloadKind::kPonger: return "ponger";
    case WorkloadKind::kScripted: return "scripted";
  }
  return "?";
}

WorkloadKind workload_kind_from_string(const std::string& s) {
  if (s == "cpu-hog" || s == "cpu_hog") return WorkloadKind::kCpuHog;
  if (s == "user-attacker" || s == "user_attacker") {
    return WorkloadKind::kUserAttacker;
  }
  if (s == "kernel-attacker" || s == "kernel_attacker") {
    return WorkloadKind::kKernelAttacker;
  }
  if (s == "workloop-attacker" || s == "workloop_attacker") {
    return WorkloadKind::kWorkLoopAttacker;
  }
  if (s == "pinger") return WorkloadKind::kPinger;
  if (s == "ponger") return WorkloadKind::kPonger;
  if (s == "scripted") return WorkloadKind::kScripted;
  throw ConfigError("unknown workload kind '" + s + "'");
}

double draw_jitter(Rng& rng, const JitterSpec& jitter) {
  switch (jitter.kind) {
    case JitterKind::kNone:
      return 0.0;
    case JitterKind::kUniform:
      return (2.0 * rng.next_unit_open() - 1.0) * jitter.param_us;
    case JitterKind::kGaussian:
      return rng.next_gaussian(jitter.param_us);
  }
  return 0.0;
}

void WorkloadSpec::validate() const {
  if (guest_tick <= 0) throw ConfigError("guest_tick must be positive");
  if (phase_offset < 0) throw ConfigError("phase_offset must be >= 0");
  switch (kind) {
    case WorkloadKind::kUserAttacker:
    case WorkloadKind::kKernelAttacker:
    case WorkloadKind::kWorkLoopAttacker:
      if (spin < 1) throw ConfigError("attacker spin must be >= 1us");
      if (sleep_request < 0) throw ConfigError("sleep_request must be >= 0");
      if (check_granularity < 1) {
        throw ConfigError("check_granularity must be >= 1");
      }
      if (loops_per_us <= 0) throw ConfigError("loops_per_us must be > 0");
      break;
    case WorkloadKind::kPinger:
    case WorkloadKind::kPonger:
      if (peer < 0) throw ConfigError("ping-pong workload requires a peer");
      if (message_cost < 0) throw ConfigError("message_cost must be >= 0");
      if (ping_interval < 0) throw ConfigError("ping_interval must be >= 0");
      if (kind == WorkloadKind::kPinger && message_cost == 0 &&
          ping_interval == 0) {
        throw ConfigError(
            "pinger with zero message_cost needs a positive ping_interval");
      }
      break;
    case WorkloadKind::kScripted: {
      Micros prev_end = 0;
      for (const auto& [wake, block] : script) {
        if (wake < prev_end || block <= wake) {
          throw ConfigError("script segments must be increasing [wake,block)");
        }
        prev_end = block;
      }
      break;
    }
    case WorkloadKind::kCpuHog:
      break;
  }
}

namespace {

class CpuHogProgram final : public WorkloadProgram {};

// Common machinery of the user-level, kernel-level and work-loop attackers:
// burn CPU until `spin` of wall-clock time has elapsed since the last wake,
// halt briefly so the periodic sample finds someone else running, resume at
// the next guest-tick boundary. The threshold is wall time, as measured by
// the real attack's timestamp deltas: a preempted attacker overshoots its
// deadline and sleeps almost immediately once redispatched.
class AttackerProgram final : public WorkloadProgram {
 public:
  explicit AttackerProgram(const WorkloadSpec& spec) : spec_(spec) {}

  bool starts_blocked() const override { return spec_.phase_offset > 0; }

  void start(Simulation& sim, int vm) override {
    const VirtualTime begin{spec_.phase_offset};
    deadline_ = begin + draw_burst(sim);
    if (spec_.phase_offset > 0) sim.wake_vcpu_at(vm, begin);
  }

  void on_dispatch(Simulation& sim, int vm) override {
    const VirtualTime at = deadline_ < sim.now() ? sim.now() : deadline_;
    yield_ = sim.arm_timer(vm, at, EventKind::kVcpuYield);
  }

  void on_preempt(Simulation& sim, int /*vm*/, Micros /*ran*/) override {
    sim.cancel_timer(yield_);
  }

  void on_timer(Simulation& sim, int vm, EventKind /*kind*/) override {
    yield_ = EventHandle();
    // The guest wakes the attacker at the first guest-tick boundary at or
    // after expiry of the requested sleep.
    const Micros req = std::max<Micros>(spec_.sleep_request, 1);
    VirtualTime wake = ceil_to(sim.now() + req, spec_.guest_tick);
    const double latency = draw_jitter(sim.rng(), spec_.jitter);
    if (latency > 0.0) wake = wake + static_cast<Micros>(latency);
    sim.wake_vcpu_at(vm, wake);
    sim.block_running(vm);
  }

  void on_wake(Simulation& sim, int /*vm*/) override {
    deadline_ = sim.now() + draw_burst(sim);
  }

 private:
  Micros draw_burst(Simulation& sim) {
    double burst = static_cast<double>(spec_.spin);
    burst += draw_jitter(sim.rng(), spec_.jitter);
    Micros b = static_cast<Micros>(burst);
    if (spec_.kind == WorkloadKind::kWorkLoopAttacker) {
      // The clock is only consulted every check_granularity loops, so the
      // detected end of the spin overshoots by up to one check span.
      const Micros span = std::max<Micros>(
          1, std::llround(static_cast<double>(spec_.check_granularity) /
                          spec_.loops_per_us));
      b += sim.rng().next_below(span);
    }
    return std::max<Micros>(b, 1);
  }

  WorkloadSpec spec_;
  VirtualTime deadline_{};
  EventHandle yield_;
};

// Request/response latency probe. Sends to the peer, blocks, and measures
// the time from send to having fully processed the reply.
class PingerProgram final : public WorkloadProgram {
  enum class Phase { kPrepare, kAwaitReply, kProcessReply, kPace };

 public:
  explicit PingerProgram(const WorkloadSpec& spec) : spec_(spec) {}

  void start(Simulation&, int) override {
    remaining_ = spec_.message_cost;
    phase_ = Phase::kPrepare;
  }

  void on_dispatch(Simulation& sim, int vm) override {
    if (phase_ == Phase::kPrepare || phase_ == Phase::kProcessReply) {
      timer_ =
          sim.arm_timer(vm, sim.now() + remaining_, EventKind::kWorkloadTimer);
    }
  }

  void on_preempt(Simulation& sim, int /*vm*/, Micros ran) override {
    sim.cancel_timer(timer_);
    remaining_ = std::max<Micros>(remaining_ - ran, 0);
  }

  void on_timer(Simulation& sim, int vm, EventKind /*kind*/) override {
    timer_ = EventHandle();
    if (phase_ == Phase::kPrepare) {
      send_at_ = sim.now();
      phase_ = Phase::kAwaitReply;
      sim.wake_vcpu(spec_.peer);
      sim.block_running(vm);
      return;
    }
    // Reply processed end to end.
    sim.record_rtt(vm, sim.now() - send_at_);
    remaining_ = spec_.message_cost;
    const VirtualTime next_send = send_at_ + spec_.ping_interval;
    if (next_send <= sim.now()) {
      phase_ = Phase::kPrepare;
      timer_ =
          sim.arm_timer(vm, sim.now() + remaining_, EventKind::kWorkloadTimer);
    } else {
      phase_ = Phase::kPace;
      sim.wake_vcpu_at(vm, next_send);
      sim.block_running(vm);
    }
  }

  void on_wake(Simulation&, int) override {
    remaining_ = spec_.message_cost;
    phase_ =
        phase_ == Phase::kAwaitReply ? Phase::kProcessReply : Phase::kPrepare;
  }

 private:
  WorkloadSpec spec_;
  Phase phase_ = Phase::kPrepare;
  Micros remaining_ = 0;
  VirtualTime send_at_{};
  EventHandle timer_;
};

class PongerProgram final : public WorkloadProgram {
 public:
  explicit PongerProgram(const WorkloadSpec& spec) : spec_(spec) {}

  bool starts_blocked() const override { return true; }

  void on_wake(Simulation&, int) override { remaining_ = spec_.message_cost; }

  void on_dispatch(Simulation& sim, int vm) override {
    timer_ =
        sim.arm_timer(vm, sim.now() + remaining_, EventKind::kWorkloadTimer);
  }

  void on_preempt(Simulation& sim, int /*vm*/, Micros ran) override {
    sim.cancel_timer(timer_);
    remaining_ = std::max<Micros>(remaining_ - ran, 0);
  }

  void on_timer(Simulation& sim, int vm, EventKind /*kind*/) override {
    timer_ = EventHandle();
    sim.wake_vcpu(spec_.peer);
    sim.block_running(vm);
  }

 private:
  WorkloadSpec spec_;
  Micros remaining_ = 0;
  EventHandle timer_;
};

// Runs exactly during the configured wall-clock intervals, independent of
// how much CPU it actually obtains. Blocks land at absolute times.
class ScriptedProgram final : public WorkloadProgram {
 public:
  explicit ScriptedProgram(const WorkloadSpec& spec) : spec_(spec) {}

  bool starts_blocked() const override {
    return spec_.script.empty() || spec_.script.front().first > 0;
  }

  void start(Simulation& sim, int vm) override {
    if (spec_.script.empty()) return;
    const auto& [wake, block] = spec_.script.front();
    if (wake > 0) {
      sim.wake_vcpu_at(vm, VirtualTime{wake});
    } else {
      sim.arm_timer(vm, VirtualTime{block}, EventKind::kVcpuYield);
    }
  }

  void on_wake(Simulation& sim, int vm) override {
    sim.arm_timer(vm, VirtualTime{spec_.script[idx_].second},
                  EventKind::kVcpuYield);
  }

  void on_timer(Simulation& sim, int vm, EventKind /*kind*/) override {
    sim.block_vcpu(vm);
    ++idx_;
    if (idx_ < spec_.script.size()) {
      sim.wake_vcpu_at(vm, VirtualTime{spec_.script[idx_].first});
    }
  }

 private:
  WorkloadSpec spec_;
  std::size_t idx_ = 0;
};

}  // namespace

std::unique_ptr<WorkloadProgram> make_program(const WorkloadSpec& spec) {
  switch (spec.kind) {
    case WorkloadKind::kCpuHog:
      return std::make_unique<CpuHogProgram>();
    case WorkloadKind::kUserAttacker:
    case WorkloadKind::kKernelAttacker:
    case WorkloadKind::kWorkLoopAttacker:
      return std::make_unique<AttackerProgram>(spec);
    case WorkloadKind::kPinger:
      return std::make_unique<PingerProgram>(spec);
    case WorkloadKind::kPonger:
      return std::make_unique<PongerProgram>(spec);
    case WorkloadKind::kScripted:
      return std::make_unique<ScriptedProgram>(spec);
  }
  throw ConfigError("unhandled workload kind");
}

}  // namespace credsim
