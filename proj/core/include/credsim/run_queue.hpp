#pragma once

#include <vector>

#include "credsim/vcpu.hpp"

namespace credsim {

// Per-PCPU queue of runnable VCPUs: all BOOST entries ahead of all UNDER
// entries ahead of all OVER entries, FIFO within each band. The running
// VCPU is not kept on the queue.
class RunQueue {
 public:
  void enqueue(int vcpu, Priority band);
  bool remove(int vcpu);
  bool contains(int vcpu) const;

  // Next VCPU to dispatch, or -1. In non-work-conserving mode OVER entries
  // are not eligible and the PCPU idles instead.
  int head(bool work_conserving) const;
  int pop_head(bool work_conserving);

  std::size_t size() const;
  bool empty() const { return size() == 0; }

  // Queue contents in dispatch order (BOOST*, UNDER*, OVER*).
  std::vector<int> scan() const;

 private:
  std::vector<int>& band(Priority p);
  const std::vector<int>& band(Priority p) const;

  std::vector<int> boost_;
  std::vector<int> under_;
  std::vector<int> over_;
};

}  // namespace credsim
