#include "credsim/event_queue.hpp"

#include <string>

#include "credsim/error.hpp"

namespace credsim {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kDebitTick: return "debit-tick";
    case EventKind::kRescheduleTick: return "reschedule-tick";
    case EventKind::kSampleArrival: return "sample-arrival";
    case EventKind::kUniformWindowStart: return "uniform-window";
    case EventKind::kVcpuWake: return "vcpu-wake";
    case EventKind::kVcpuYield: return "vcpu-yield";
    case EventKind::kWorkloadTimer: return "workload-timer";
  }
  return "?";
}

EventHandle EventQueue::schedule(VirtualTime at, EventKind kind,
                                 std::int32_t arg) {
  if (at < now_) {
    throw SimError("schedule at t=" + std::to_string(at.us) +
                   "us precedes clock t=" + std::to_string(now_.us) + "us");
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push(Event{at, kind, arg, seq});
  pending_.insert(seq);
  return EventHandle(seq);
}

bool EventQueue::cancel(EventHandle& handle) {
  const std::uint64_t seq = handle.seq_;
  handle = EventHandle();
  return seq != 0 && pending_.erase(seq) > 0;
}

std::optional<Event> EventQueue::pop_until(VirtualTime t_end) {
  if (t_end < now_) t_end = now_;  // the clock never rewinds
  while (!heap_.empty()) {
    const Event top = heap_.top();
    if (!pending_.contains(top.seq)) {
      heap_.pop();  // cancelled entry
      continue;
    }
    if (t_end < top.at) break;
    heap_.pop();
    pending_.erase(top.seq);
    now_ = top.at;
    return top;
  }
  now_ = t_end;
  return std::nullopt;
}

}  // namespace credsim
