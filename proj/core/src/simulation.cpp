#include "credsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "credsim/error.hpp"
#include "credsim/samplers.hpp"

namespace credsim {

namespace {
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;
}

Simulation::Simulation(SchedulerConfig cfg, std::vector<VmSetup> setups,
                       int pcpus, Rng rng, TestHooks hooks)
    : cfg_(cfg), hooks_(std::move(hooks)), rng_(rng) {
  cfg_.validate();
  if (pcpus <= 0) throw ConfigError("need at least one pcpu");
  if (setups.empty()) throw ConfigError("need at least one vm");

  pcpus_.resize(pcpus);
  std::vector<int> per_pcpu(pcpus, 0);
  for (const auto& s : setups) {
    if (s.pcpu < 0 || s.pcpu >= pcpus) {
      throw ConfigError("vm assigned to invalid pcpu " +
                        std::to_string(s.pcpu));
    }
    s.spec.validate();
    if ((s.spec.kind == WorkloadKind::kPinger ||
         s.spec.kind == WorkloadKind::kPonger) &&
        s.spec.peer >= static_cast<int>(setups.size())) {
      throw ConfigError("ping-pong peer out of range");
    }
    ++per_pcpu[s.pcpu];
  }

  const int n = static_cast<int>(setups.size());
  specs_.reserve(n);
  vcpus_.resize(n);
  rtt_.resize(n);
  for (int i = 0; i < n; ++i) {
    const VmSetup& su = setups[i];
    specs_.push_back(su.spec);
    VcpuState& v = vcpus_[i];
    v.id = i;
    v.pcpu = su.pcpu;
    v.kind = su.spec.kind;
    v.weight_share = cfg_.mode == SchedMode::kNonWorkConserving
                         ? cfg_.cap_percent / 100.0
                         : 1.0 / per_pcpu[su.pcpu];
    v.credits = std::min<std::int64_t>(
        std::llround(cfg_.max_credits * v.weight_share), cfg_.max_credits);
    v.program = make_program(su.spec);
    if (v.program->starts_blocked()) {
      v.prio = Priority::kBlocked;
    } else {
      v.prio = v.credits > 0 ? Priority::kUnder : Priority::kOver;
    }
  }

  poisson_max_us_ = 3 * cfg_.fast_tick;
  poisson_mean_us_ = static_cast<double>(cfg_.fast_tick);

  for (auto& v : vcpus_) v.program->start(*this, v.id);
  for (auto& v : vcpus_) {
    if (v.prio != Priority::kBlocked) {
      pcpus_[v.pcpu].queue.enqueue(v.id, v.prio);
    }
  }

  arm_fast_chain(VirtualTime{0});
  queue_.schedule(VirtualTime{cfg_.reschedule_tick},
                  EventKind::kRescheduleTick);
  if (cfg_.variant == Variant::kUniform) {
    for (int p = 0; p < pcpus; ++p) roll_window(p, VirtualTime{0});
  } else if (cfg_.variant == Variant::kPoisson ||
             cfg_.variant == Variant::kBernoulli) {
    for (int p = 0; p < pcpus; ++p) arm_sample(p);
  }
  for (int p = 0; p < pcpus; ++p) maybe_reschedule(p, VirtualTime{0});
}

void Simulation::run(Micros horizon, Micros warmup) {
  if (result_) throw SimError("simulation already ran");
  if (warmup < 0 || horizon <= warmup) {
    throw ConfigError("horizon must exceed warmup");
  }
  warmup_us_ = warmup;

  run_until(VirtualTime{warmup});
  snapshot_.clear();
  for (int vm = 0; vm < vm_count(); ++vm) snapshot_.push_back(live_usage(vm));
  snapshot_idle_ = live_idle_total();

  run_until(VirtualTime{horizon});
  finalize(VirtualTime{horizon});

  UsageLedger ledger;
  ledger.pcpus = pcpu_count();
  ledger.window = horizon - warmup;
  ledger.vms.resize(vm_count());
  Micros scheduled_total = 0;
  for (int vm = 0; vm < vm_count(); ++vm) {
    const VmUsage end = live_usage(vm);
    VmUsage& u = ledger.vms[vm];
    u.scheduled = end.scheduled - snapshot_[vm].scheduled;
    u.charged_credits = end.charged_credits - snapshot_[vm].charged_credits;
    u.debit_events = end.debit_events - snapshot_[vm].debit_events;
    u.boost_wakes = end.boost_wakes - snapshot_[vm].boost_wakes;
    scheduled_total += u.scheduled;
  }
  ledger.idle = live_idle_total() - snapshot_idle_;
  if (scheduled_total + ledger.idle !=
      ledger.window * static_cast<Micros>(ledger.pcpus)) {
    throw SimError("conservation violated: scheduled + idle != horizon");
  }
  result_ = std::move(ledger);
}

void Simulation::run_until(VirtualTime t) {
  while (auto ev = queue_.pop_until(t)) {
    ++event_counts_[static_cast<int>(ev->kind)];
    for (std::uint64_t word :
         {static_cast<std::uint64_t>(ev->at.us), ev->seq,
          static_cast<std::uint64_t>(ev->kind),
          static_cast<std::uint64_t>(static_cast<std::int64_t>(ev->arg))}) {
      trace_hash_ = (trace_hash_ ^ word) * kFnvPrime;
    }
    if (hooks_.record_trace) trace_.push_back(*ev);
    handle(*ev);
    if (hooks_.validate_invariants) validate_state();
  }
}

void Simulation::handle(const Event& ev) {
  switch (ev.kind) {
    case EventKind::kDebitTick:
    case EventKind::kUniformWindowStart:
      fast_phase(ev.at);
      arm_fast_chain(ev.at);
      break;
    case EventKind::kRescheduleTick:
      fast_phase(ev.at);
      do_refill(ev.at);
      do_round_robin(ev.at);
      arm_fast_chain(ev.at);
      queue_.schedule(ev.at + cfg_.reschedule_tick,
                      EventKind::kRescheduleTick);
      break;
    case EventKind::kSampleArrival:
      handle_sample(ev.arg, ev.at);
      break;
    case EventKind::kVcpuWake:
      handle_wake(ev.arg, ev.at);
      break;
    case EventKind::kVcpuYield:
    case EventKind::kWorkloadTimer:
      vcpus_[ev.arg].program->on_timer(*this, ev.arg, ev.kind);
      break;
  }
}

void Simulation::arm_fast_chain(VirtualTime from) {
  EventKind kind = EventKind::kDebitTick;
  switch (cfg_.variant) {
    case Variant::kCredit:
    case Variant::kExact:
      break;
    case Variant::kUniform:
      kind = EventKind::kUniformWindowStart;
      break;
    case Variant::kPoisson:
    case Variant::kBernoulli:
      return;  // sampling runs on its own arrival events
  }
  const VirtualTime next = from + cfg_.fast_tick;
  // Boundaries shared with the reschedule tick are handled there, keeping
  // the debit-then-refill order fixed.
  if (next.us % cfg_.reschedule_tick == 0) return;
  queue_.schedule(next, kind);
}

void Simulation::fast_phase(VirtualTime t) {
  switch (cfg_.variant) {
    case Variant::kCredit:
      for (int p = 0; p < pcpu_count(); ++p) {
        ++sampler_.samples;
        if (pcpus_[p].running >= 0) {
          apply_debit(pcpus_[p].running, cfg_.debit_per_sample);
        }
        maybe_reschedule(p, t);
      }
      break;
    case Variant::kExact:
      for (int p = 0; p < pcpu_count(); ++p) {
        exact_charge_running(p, t);
        maybe_reschedule(p, t);
      }
      break;
    case Variant::kUniform:
      for (int p = 0; p < pcpu_count(); ++p) {
        window_check_tick(p, t);
        roll_window(p, t);
        maybe_reschedule(p, t);
      }
      break;
    case Variant::kPoisson:
    case Variant::kBernoulli:
      break;
  }
}

void Simulation::do_refill(VirtualTime /*t*/) {
  for (auto& v : vcpus_) {
    const std::int64_t gain = std::llround(cfg_.max_credits * v.weight_share);
    v.credits = std::min<std::int64_t>(v.credits + gain, cfg_.max_credits);
    if (v.prio == Priority::kUnder || v.prio == Priority::kOver) {
      const Priority np =
          v.credits > 0 ? Priority::kUnder : Priority::kOver;
      if (np != v.prio) {
        RunQueue& q = pcpus_[v.pcpu].queue;
        if (q.contains(v.id)) {
          q.remove(v.id);
          v.prio = np;
          q.enqueue(v.id, np);
        } else {
          v.prio = np;
        }
      }
    }
  }
}

void Simulation::do_round_robin(VirtualTime t) {
  for (int p = 0; p < pcpu_count(); ++p) {
    const int vm = pcpus_[p].running;
    if (vm >= 0) {
      stop_running(p, t, StopKind::kPreempt);
      enqueue(vm);
    }
  }
  for (int p = 0; p < pcpu_count(); ++p) maybe_reschedule(p, t);
}

void Simulation::arm_sample(int pcpu) {
  VirtualTime at;
  if (!hooks_.sample_times.empty()) {
    if (scripted_sample_idx_ >= hooks_.sample_times.size()) return;
    at = VirtualTime{hooks_.sample_times[scripted_sample_idx_++]};
  } else if (cfg_.variant == Variant::kPoisson) {
    const Micros dt =
        sample_trunc_exp(rng_, poisson_mean_us_, poisson_max_us_);
    // A draw clamped at the bound fires the interrupt but charges nobody;
    // see PcpuState::sample_is_rearm.
    pcpus_[pcpu].sample_is_rearm = (dt == poisson_max_us_);
    ++sampler_.intervals;
    sampler_.interval_sum += dt;
    at = now() + dt;
  } else {
    const std::int64_t k = sample_geometric_slots(rng_, cfg_.bernoulli_p);
    pcpus_[pcpu].slot_cursor += k;
    ++sampler_.intervals;
    sampler_.interval_sum += k * cfg_.bernoulli_slot;
    at = VirtualTime{pcpus_[pcpu].slot_cursor * cfg_.bernoulli_slot};
  }
  queue_.schedule(at, EventKind::kSampleArrival, pcpu);
}

void Simulation::handle_sample(int pcpu, VirtualTime t) {
  const bool charge = !pcpus_[pcpu].sample_is_rearm;
  if (charge) {
    ++sampler_.samples;
    if (pcpus_[pcpu].running >= 0) {
      apply_debit(pcpus_[pcpu].running, cfg_.debit_per_sample);
    }
  }
  arm_sample(pcpu);
  if (charge) maybe_reschedule(pcpu, t);
}

Micros Simulation::draw_window_offset() {
  if (!hooks_.uniform_offsets.empty()) {
    const Micros off =
        hooks_.uniform_offsets[scripted_offset_idx_ %
                               hooks_.uniform_offsets.size()];
    ++scripted_offset_idx_;
    return off;
  }
  const std::int64_t slots = cfg_.fast_tick / cfg_.uniform_quantum;
  return cfg_.uniform_quantum * rng_.next_below(slots);
}

void Simulation::roll_window(int pcpu, VirtualTime t) {
  PcpuState& p = pcpus_[pcpu];
  p.window_start = t;
  p.window_offset = draw_window_offset();
  p.window_pending = true;
}

// The virtual sampling interrupt fires at window_start + offset and charges
// whichever VCPU occupies that instant (occupancy is half-open [start,end)).
// The charge is applied at the first switch or window tick past the mark.
void Simulation::window_check_switch(int pcpu, VirtualTime t) {
  PcpuState& p = pcpus_[pcpu];
  if (!p.window_pending) return;
  const VirtualTime mark = p.window_start + p.window_offset;
  if (!(mark < t)) return;
  p.window_pending = false;
  ++sampler_.samples;
  if (p.seg_start <= mark) {
    apply_debit(p.running, cfg_.debit_per_sample);
  }
  // Otherwise the mark fell before this occupant started (idle gap);
  // nobody is charged.
}

void Simulation::window_check_tick(int pcpu, VirtualTime t) {
  PcpuState& p = pcpus_[pcpu];
  if (!p.window_pending) return;
  const VirtualTime mark = p.window_start + p.window_offset;
  if (!(mark < t)) return;
  p.window_pending = false;
  ++sampler_.samples;
  if (p.running >= 0 && p.seg_start <= mark) {
    apply_debit(p.running, cfg_.debit_per_sample);
  }
}

void Simulation::enqueue(int vm) {
  VcpuState& v = vcpus_[vm];
  pcpus_[v.pcpu].queue.enqueue(vm, v.prio);
}

void Simulation::start_running(int pcpu, int vm, VirtualTime t) {
  PcpuState& p = pcpus_[pcpu];
  if (p.running >= 0) throw SimError("start_running: pcpu busy");
  p.idle += t - p.seg_start;
  p.running = vm;
  p.seg_start = t;
  p.running_since = t;
  vcpus_[vm].program->on_dispatch(*this, vm);
}

void Simulation::stop_running(int pcpu, VirtualTime t, StopKind kind) {
  PcpuState& p = pcpus_[pcpu];
  const int vm = p.running;
  if (vm < 0) throw SimError("stop_running: pcpu idle");
  VcpuState& v = vcpus_[vm];
  const Micros ran = t - p.seg_start;
  if (cfg_.variant == Variant::kExact) exact_charge_running(pcpu, t);
  if (cfg_.variant == Variant::kUniform) window_check_switch(pcpu, t);
  v.scheduled += ran;
  if (kind == StopKind::kPreempt) v.program->on_preempt(*this, vm, ran);
  p.running = -1;
  p.seg_start = t;  // idle segment begins
}

void Simulation::maybe_reschedule(int pcpu, VirtualTime t) {
  PcpuState& p = pcpus_[pcpu];
  for (;;) {
    const int head = p.queue.head(work_conserving());
    if (p.running < 0) {
      if (head < 0) return;
      p.queue.remove(head);
      start_running(pcpu, head, t);
      return;
    }
    const VcpuState& runner = vcpus_[p.running];
    bool kick = false;
    if (head >= 0 &&
        band_rank(vcpus_[head].prio) < band_rank(runner.prio)) {
      kick = true;
    }
    if (!work_conserving() && runner.prio == Priority::kOver) kick = true;
    if (!kick) return;
    const int vm = p.running;
    stop_running(pcpu, t, StopKind::kPreempt);
    enqueue(vm);
  }
}

void Simulation::apply_debit(int vm, std::int64_t amount) {
  VcpuState& v = vcpus_[vm];
  v.credits -= amount;
  v.charged_credits += amount;
  ++v.debit_events;
  if (v.prio == Priority::kBlocked) return;
  // A charge demotes BOOST; UNDER/OVER track the sign of the balance.
  const Priority np = v.credits > 0 ? Priority::kUnder : Priority::kOver;
  if (np == v.prio) return;
  RunQueue& q = pcpus_[v.pcpu].queue;
  if (q.contains(vm)) {
    q.remove(vm);
    v.prio = np;
    q.enqueue(vm, np);
  } else {
    v.prio = np;
  }
}

void Simulation::exact_charge_running(int pcpu, VirtualTime t) {
  PcpuState& p = pcpus_[pcpu];
  const int vm = p.running;
  if (vm < 0) return;
  VcpuState& v = vcpus_[vm];
  const Micros total = (t - p.running_since) + v.exact_remainder;
  const std::int64_t credits = total / kCreditUs;
  v.exact_remainder = total % kCreditUs;
  p.running_since = t;
  if (credits > 0) apply_debit(vm, credits);
}

void Simulation::handle_wake(int vm, VirtualTime t) {
  VcpuState& v = vcpus_[vm];
  if (v.prio != Priority::kBlocked) return;  // spurious wake
  if (cfg_.boost_enabled && v.credits > 0) {
    v.prio = Priority::kBoost;
    ++v.boost_wakes;
  } else {
    v.prio = v.credits > 0 ? Priority::kUnder : Priority::kOver;
  }
  pcpus_[v.pcpu].queue.enqueue(vm, v.prio);
  v.program->on_wake(*this, vm);
  // With boost disabled wakes never preempt: the waker sits on the queue
  // until the next scheduling point unless the pcpu is idle.
  if (cfg_.boost_enabled || pcpus_[v.pcpu].running < 0) {
    maybe_reschedule(v.pcpu, t);
  }
}

EventHandle Simulation::arm_timer(int vm, VirtualTime at, EventKind kind) {
  if (kind != EventKind::kVcpuYield && kind != EventKind::kWorkloadTimer) {
    throw SimError("arm_timer: not a workload event kind");
  }
  return queue_.schedule(at, kind, vm);
}

void Simulation::cancel_timer(EventHandle& handle) { queue_.cancel(handle); }

void Simulation::wake_vcpu_at(int vm, VirtualTime at) {
  queue_.schedule(at, EventKind::kVcpuWake, vm);
}

void Simulation::block_running(int vm) {
  VcpuState& v = vcpus_[vm];
  if (pcpus_[v.pcpu].running != vm) {
    throw SimError("block_running: vm is not running");
  }
  stop_running(v.pcpu, now(), StopKind::kBlock);
  v.prio = Priority::kBlocked;
  maybe_reschedule(v.pcpu, now());
}

void Simulation::block_vcpu(int vm) {
  VcpuState& v = vcpus_[vm];
  if (v.prio == Priority::kBlocked) {
    throw SimError("block of an already-blocked vcpu (workload bug)");
  }
  if (pcpus_[v.pcpu].running == vm) {
    block_running(vm);
    return;
  }
  pcpus_[v.pcpu].queue.remove(vm);
  v.prio = Priority::kBlocked;
}

void Simulation::record_rtt(int vm, Micros rtt) {
  if (now().us > warmup_us_) rtt_[vm].add(static_cast<double>(rtt));
}

void Simulation::finalize(VirtualTime t) {
  for (int p = 0; p < pcpu_count(); ++p) {
    if (pcpus_[p].running >= 0) {
      stop_running(p, t, StopKind::kFinal);
    } else {
      pcpus_[p].idle += t - pcpus_[p].seg_start;
      pcpus_[p].seg_start = t;
    }
  }
}

VmUsage Simulation::live_usage(int vm) const {
  const VcpuState& v = vcpus_[vm];
  VmUsage u{v.scheduled, v.charged_credits, v.debit_events, v.boost_wakes};
  const PcpuState& p = pcpus_[v.pcpu];
  if (p.running == vm) u.scheduled += now() - p.seg_start;
  return u;
}

Micros Simulation::live_idle_total() const {
  Micros idle = 0;
  for (const auto& p : pcpus_) {
    idle += p.idle;
    if (p.running < 0) idle += now() - p.seg_start;
  }
  return idle;
}

const UsageLedger& Simulation::usage() const {
  if (!result_) throw SimError("usage() before run()");
  return *result_;
}

void Simulation::debug_set_credits(int vm, std::int64_t credits) {
  VcpuState& v = vcpus_[vm];
  v.credits = credits;
  if (v.prio == Priority::kBlocked) return;
  const Priority np = v.credits > 0
                          ? (v.prio == Priority::kBoost ? Priority::kBoost
                                                        : Priority::kUnder)
                          : Priority::kOver;
  if (np != v.prio) {
    RunQueue& q = pcpus_[v.pcpu].queue;
    if (q.contains(vm)) {
      q.remove(vm);
      v.prio = np;
      q.enqueue(vm, np);
    } else {
      v.prio = np;
    }
  }
  maybe_reschedule(v.pcpu, now());
}

void Simulation::validate_state() const {
  for (const auto& p : pcpus_) {
    int last_rank = 0;
    for (int id : p.queue.scan()) {
      const VcpuState& v = vcpus_[id];
      if (v.prio == Priority::kBlocked) {
        throw SimError("blocked vcpu on run queue");
      }
      if (band_rank(v.prio) < last_rank) {
        throw SimError("run queue band order violated");
      }
      last_rank = band_rank(v.prio);
      if (p.running == id) throw SimError("running vcpu also queued");
    }
  }
  for (const auto& v : vcpus_) {
    if (v.credits > cfg_.max_credits) throw SimError("credit cap exceeded");
    if (v.prio == Priority::kUnder && v.credits <= 0) {
      throw SimError("UNDER vcpu without credits");
    }
    if (v.prio == Priority::kOver && v.credits > 0) {
      throw SimError("OVER vcpu with credits");
    }
    if (v.prio == Priority::kBoost && v.credits <= 0) {
      throw SimError("BOOST vcpu without credits");
    }
    if (v.prio == Priority::kBlocked && pcpus_[v.pcpu].running == v.id) {
      throw SimError("blocked vcpu marked running");
    }
  }
}

}  // namespace credsim
