#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "credsim/scenario.hpp"
#include "credsim/stats.hpp"

namespace credsim {

struct VmOutcome {
  int vm = -1;
  WorkloadKind kind = WorkloadKind::kCpuHog;

  // One entry per replica, in replica order.
  std::vector<double> share;
  std::vector<double> pct_baseline;
  std::vector<double> bias_us;
  std::vector<double> debits;
  std::vector<double> rtt_mean;  // pinger replicas with at least one sample

  StatSummary share_s, pct_s, bias_s, debits_s, rtt_s;
  double boost_wakes_mean = 0.0;
};

struct RunReport {
  std::string scenario_id;
  Variant variant = Variant::kCredit;
  SchedMode mode = SchedMode::kWorkConserving;
  int pcpus = 0;
  Micros horizon = 0;
  Micros warmup = 0;
  std::uint64_t seed = 0;
  int replicas = 0;

  std::vector<VmOutcome> vms;
  std::vector<double> idle_share;  // per replica, summed over PCPUs
  StatSummary idle_s;

  bool conservation_exact = false;
  std::array<std::int64_t, kEventKindCount> event_counts{};
  SamplerStats sampler;
  std::uint64_t trace_hash0 = 0;  // replica 0, for determinism checks
};

// Runs all replicas of one scenario (fanning out across threads; replicas
// are independent and aggregation is by replica index) and aggregates.
RunReport run_scenario(const Scenario& scenario,
                       const std::string& scenario_id);

std::vector<RunReport> run_points(const std::vector<PresetPoint>& points);

// Expands a numeric scenario key into one point per value.
std::vector<PresetPoint> sweep_points(const Scenario& base,
                                      const std::string& key,
                                      const std::vector<std::string>& values,
                                      const std::string& base_id);

}  // namespace credsim
