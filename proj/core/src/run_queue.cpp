#include "credsim/run_queue.hpp"

#include <algorithm>

#include "credsim/error.hpp"

namespace credsim {

const char* to_string(Priority prio) {
  switch (prio) {
    case Priority::kBoost: return "BOOST";
    case Priority::kUnder: return "UNDER";
    case Priority::kOver: return "OVER";
    case Priority::kBlocked: return "BLOCKED";
  }
  return "?";
}

std::vector<int>& RunQueue::band(Priority p) {
  switch (p) {
    case Priority::kBoost: return boost_;
    case Priority::kUnder: return under_;
    case Priority::kOver: return over_;
    case Priority::kBlocked: break;
  }
  throw SimError("RunQueue: blocked VCPUs cannot be queued");
}

const std::vector<int>& RunQueue::band(Priority p) const {
  return const_cast<RunQueue*>(this)->band(p);
}

void RunQueue::enqueue(int vcpu, Priority p) {
  if (contains(vcpu)) throw SimError("RunQueue: VCPU already queued");
  band(p).push_back(vcpu);
}

bool RunQueue::remove(int vcpu) {
  for (auto* b : {&boost_, &under_, &over_}) {
    auto it = std::find(b->begin(), b->end(), vcpu);
    if (it != b->end()) {
      b->erase(it);
      return true;
    }
  }
  return false;
}

bool RunQueue::contains(int vcpu) const {
  for (const auto* b : {&boost_, &under_, &over_}) {
    if (std::find(b->begin(), b->end(), vcpu) != b->end()) return true;
  }
  return false;
}

int RunQueue::head(bool work_conserving) const {
  if (!boost_.empty()) return boost_.front();
  if (!under_.empty()) return under_.front();
  if (work_conserving && !over_.empty()) return over_.front();
  return -1;
}

int RunQueue::pop_head(bool work_conserving) {
  const int vcpu = head(work_conserving);
  if (vcpu >= 0) remove(vcpu);
  return vcpu;
}

std::size_t RunQueue::size() const {
  return boost_.size() + under_.size() + over_.size();
}

std::vector<int> RunQueue::scan() const {
  std::vector<int> out;
  out.reserve(size());
  for (const auto* b : {&boost_, &under_, &over_}) {
    out.insert(out.end(), b->begin(), b->end());
  }
  return out;
}

}  // namespace credsim
