#include "credsim/metrics.hpp"

#include <string>

#include "credsim/error.hpp"

namespace credsim {

namespace {
const VmUsage& vm_entry(const UsageLedger& ledger, int vm) {
  if (vm < 0 || vm >= static_cast<int>(ledger.vms.size())) {
    throw ConfigError("unknown vm id " + std::to_string(vm));
  }
  return ledger.vms[vm];
}
}  // namespace

double cpu_share(const UsageLedger& ledger, int vm) {
  if (ledger.window <= 0) throw ConfigError("cpu_share: empty window");
  return static_cast<double>(vm_entry(ledger, vm).scheduled) /
         static_cast<double>(ledger.window);
}

double percent_of_baseline(const UsageLedger& ledger, int vm,
                           double baseline_rate) {
  if (baseline_rate <= 0.0) {
    throw ConfigError("percent_of_baseline: zero baseline");
  }
  // Work units accrue at 1/us while scheduled.
  const double rate = static_cast<double>(vm_entry(ledger, vm).scheduled) /
                      static_cast<double>(ledger.window);
  return 100.0 * rate / baseline_rate;
}

Micros charge_bias_us(const UsageLedger& ledger, int vm) {
  const VmUsage& u = vm_entry(ledger, vm);
  return u.charged_credits * kCreditUs - u.scheduled;
}

}  // namespace credsim
