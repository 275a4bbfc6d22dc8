#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "credsim/config.hpp"
#include "credsim/simulation.hpp"
#include "credsim/workload.hpp"

namespace credsim {

struct VmConfig {
  WorkloadSpec spec;
  int pcpu = -1;  // -1: assigned round-robin across PCPUs in VM order
};

struct Scenario {
  int pcpus = 1;
  std::vector<VmConfig> vms;
  SchedulerConfig sched;
  Micros horizon = 60'000'000;
  Micros warmup = 300'000;
  std::uint64_t seed = 1;
  int replicas = 1;

  // Fills in round-robin PCPU assignments and checks cross-VM constraints.
  void resolve();  // throws ConfigError

  std::vector<VmSetup> setups() const;
};

// Line-oriented "key = value" format with dotted sections; '#' starts a
// comment. Unknown keys are rejected. vm.<i>.kind must precede the other
// vm.<i>.* keys so kind-specific defaults apply first.
Scenario parse_scenario(const std::string& text, const std::string& origin);
Scenario load_scenario(const std::string& path);

// Sets one scenario field by its file key (e.g. "vm.0.spin_us"). Used by
// both the parser and parameter sweeps.
void apply_key(Scenario& scn, const std::string& key,
               const std::string& value);

// True if the key addresses a numeric field (sweepable).
bool is_numeric_key(const std::string& key);

struct PresetPoint {
  std::string id;  // scenario-id emitted in reports
  Scenario scenario;
};

struct Preset {
  std::string name;
  std::string description;
  std::vector<PresetPoint> points;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

}  // namespace credsim
