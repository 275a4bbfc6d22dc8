#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "credsim/time.hpp"

namespace credsim {

enum class EventKind : std::uint8_t {
  kDebitTick = 0,
  kRescheduleTick,
  kSampleArrival,
  kUniformWindowStart,
  kVcpuWake,
  kVcpuYield,
  kWorkloadTimer,
};
inline constexpr int kEventKindCount = 7;

const char* to_string(EventKind kind);

// arg carries the VCPU id for kVcpuWake/kVcpuYield/kWorkloadTimer and the
// PCPU id for kSampleArrival; -1 otherwise.
struct Event {
  VirtualTime at;
  EventKind kind;
  std::int32_t arg;
  std::uint64_t seq;
};

class EventHandle {
 public:
  EventHandle() = default;
  bool valid() const { return seq_ != 0; }

 private:
  friend class EventQueue;
  explicit EventHandle(std::uint64_t s) : seq_(s) {}
  std::uint64_t seq_ = 0;
};

// Pending-event queue ordered by (at, seq). seq is the insertion counter, so
// events at equal times dispatch in the order they were scheduled.
class EventQueue {
 public:
  VirtualTime now() const { return now_; }

  // at must not precede the current clock.
  EventHandle schedule(VirtualTime at, EventKind kind, std::int32_t arg = -1);

  // Returns true iff the handle referred to a still-pending event. The
  // handle is invalidated either way; cancelling a fired or already
  // cancelled event is a harmless no-op.
  bool cancel(EventHandle& handle);

  // Pops the next event with at <= t_end, advancing the clock to its time.
  // When none remains, advances the clock to t_end and returns nullopt.
  std::optional<Event> pop_until(VirtualTime t_end);

  std::size_t pending() const { return pending_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return b.at < a.at;
      return b.seq < a.seq;
    }
  };

  VirtualTime now_{};
  std::uint64_t next_seq_ = 1;
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::unordered_set<std::uint64_t> pending_;
};

}  // namespace credsim
