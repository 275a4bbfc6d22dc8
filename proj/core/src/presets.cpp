#include <string>
#include <vector>

#include "credsim/scenario.hpp"

namespace credsim {

namespace {

WorkloadSpec user_attacker(Micros spin, Micros sleep_request,
                           JitterSpec jitter) {
  WorkloadSpec spec;
  spec.kind = WorkloadKind::kUserAttacker;
  spec.spin = spin;
  spec.sleep_request = sleep_request;
  spec.jitter = jitter;
  return spec;
}

WorkloadSpec cpu_hog() { return WorkloadSpec{}; }

constexpr JitterSpec kIdeal{JitterKind::kNone, 0.0};
constexpr JitterSpec kRealistic{JitterKind::kUniform, 50.0};

Scenario base_scenario(int pcpus, Variant variant) {
  Scenario scn;
  scn.pcpus = pcpus;
  scn.sched.variant = variant;
  scn.horizon = 60'000'000;
  scn.warmup = 300'000;
  scn.replicas = 20;
  return scn;
}

void add_hogs(Scenario& scn, int count) {
  for (int i = 0; i < count; ++i) scn.vms.push_back({cpu_hog(), -1});
}

// The attack cycle targets one sampling period: the requested sleep must
// leave room for the spin, and small spins can afford the default 0.5 ms.
Micros fig5_sleep_request(Micros spin) {
  const Micros room = 10'000 - spin - 500;
  return room < 100 ? 100 : room;
}

constexpr Variant kAllVariants[] = {Variant::kCredit, Variant::kExact,
                                    Variant::kPoisson, Variant::kBernoulli,
                                    Variant::kUniform};

Preset make_fig3() {
  Preset preset{"fig3",
                "attacker share vs victim count, credit scheduler, "
                "realistic jitter",
                {}};
  for (int victims = 1; victims <= 5; ++victims) {
    Scenario scn = base_scenario(2, Variant::kCredit);
    scn.vms.push_back({user_attacker(9'000, 500, kRealistic), -1});
    add_hogs(scn, victims);
    scn.resolve();
    preset.points.push_back(
        {"fig3[victims=" + std::to_string(victims) + "]", std::move(scn)});
  }
  return preset;
}

Preset make_fig4() {
  Preset preset{"fig4",
                "work-loop attacker percent-of-baseline vs victim count",
                {}};
  for (int victims = 0; victims <= 5; ++victims) {
    Scenario scn = base_scenario(2, Variant::kCredit);
    WorkloadSpec attacker = user_attacker(9'000, 500, kRealistic);
    attacker.kind = WorkloadKind::kWorkLoopAttacker;
    scn.vms.push_back({attacker, -1});
    add_hogs(scn, victims);
    scn.resolve();
    preset.points.push_back(
        {"fig4[victims=" + std::to_string(victims) + "]", std::move(scn)});
  }
  return preset;
}

Preset make_fig5() {
  Preset preset{"fig5",
                "attacker share vs spin length, ideal timing, credit "
                "scheduler",
                {}};
  std::vector<Micros> spins;
  for (Micros s = 7'000; s <= 9'900; s += 100) spins.push_back(s);
  spins.push_back(10'000);
  for (Micros spin : spins) {
    Scenario scn = base_scenario(2, Variant::kCredit);
    scn.vms.push_back(
        {user_attacker(spin, fig5_sleep_request(spin), kIdeal), -1});
    add_hogs(scn, 5);
    scn.resolve();
    preset.points.push_back(
        {"fig5[spin_us=" + std::to_string(spin) + "]", std::move(scn)});
  }
  return preset;
}

Preset make_table1() {
  Preset preset{"table1",
                "user attack in non-work-conserving mode with 33.3% caps",
                {}};
  Scenario scn = base_scenario(2, Variant::kCredit);
  scn.sched.mode = SchedMode::kNonWorkConserving;
  scn.sched.cap_percent = 33.3;
  scn.vms.push_back({user_attacker(9'000, 500, kRealistic), -1});
  add_hogs(scn, 5);
  scn.resolve();
  preset.points.push_back({"table1", std::move(scn)});
  return preset;
}

Preset attack_matrix(const std::string& name, const std::string& description,
                     WorkloadKind attacker_kind) {
  Preset preset{name, description, {}};
  for (Variant variant : kAllVariants) {
    Scenario scn = base_scenario(2, variant);
    WorkloadSpec attacker = user_attacker(9'000, 500, kRealistic);
    attacker.kind = attacker_kind;
    scn.vms.push_back({attacker, -1});
    add_hogs(scn, 5);
    scn.resolve();
    preset.points.push_back(
        {name + "[" + to_string(variant) + "]", std::move(scn)});
  }
  return preset;
}

Preset make_kernel_fig() {
  Preset preset{"kernel-fig",
                "kernel-level attacker across schedulers and victim counts",
                {}};
  WorkloadSpec attacker;
  attacker.kind = WorkloadKind::kKernelAttacker;
  attacker.spin = 8'000;
  attacker.sleep_request = 1'200;
  attacker.jitter = {JitterKind::kUniform, 500.0};
  for (Variant variant : kAllVariants) {
    Scenario scn = base_scenario(2, variant);
    scn.vms.push_back({attacker, -1});
    add_hogs(scn, 5);
    scn.resolve();
    preset.points.push_back(
        {"kernel-fig[" + std::string(to_string(variant)) + "]",
         std::move(scn)});
  }
  for (int victims = 1; victims <= 4; ++victims) {
    Scenario scn = base_scenario(2, Variant::kCredit);
    scn.vms.push_back({attacker, -1});
    add_hogs(scn, victims);
    scn.resolve();
    preset.points.push_back(
        {"kernel-fig[credit,victims=" + std::to_string(victims) + "]",
         std::move(scn)});
  }
  return preset;
}

Preset make_table5() {
  Preset preset{"table5-relative",
                "ping-pong round-trip latency across schedulers, relative "
                "to the credit scheduler",
                {}};
  for (int config = 1; config <= 2; ++config) {
    for (Variant variant : kAllVariants) {
      Scenario scn = base_scenario(2, variant);
      WorkloadSpec pinger;
      pinger.kind = WorkloadKind::kPinger;
      pinger.peer = 1;
      pinger.message_cost = 10;
      pinger.ping_interval = 1'000;
      WorkloadSpec ponger;
      ponger.kind = WorkloadKind::kPonger;
      ponger.peer = 0;
      ponger.message_cost = 10;
      scn.vms.push_back({pinger, 0});
      scn.vms.push_back({ponger, 0});
      if (config == 2) scn.vms.push_back({cpu_hog(), 1});
      scn.resolve();
      preset.points.push_back({"table5[config" + std::to_string(config) +
                                   "," + to_string(variant) + "]",
                               std::move(scn)});
    }
  }
  return preset;
}

Preset make_leak_bound() {
  Preset preset{"leak-bound",
                "slot-aligned dodger against the 1 ms quantized samplers",
                {}};
  for (Variant variant : {Variant::kBernoulli, Variant::kUniform}) {
    Scenario scn = base_scenario(1, variant);
    scn.horizon = 10'000'000;
    scn.replicas = 100;
    // Runs up to just before the last 1 ms slot of each 10 ms period and
    // resumes exactly at the next period boundary.
    scn.vms.push_back({user_attacker(8'990, 1'010, kIdeal), -1});
    add_hogs(scn, 1);
    scn.resolve();
    preset.points.push_back(
        {"leak-bound[" + std::string(to_string(variant)) + "]",
         std::move(scn)});
  }
  return preset;
}

Preset make_poisson_bias() {
  Preset preset{"poisson-bias",
                "charge bias of the ideal attacker under poisson sampling",
                {}};
  Scenario scn = base_scenario(2, Variant::kPoisson);
  scn.horizon = 10'000'000;
  scn.replicas = 100;
  scn.vms.push_back({user_attacker(9'000, 500, kIdeal), -1});
  add_hogs(scn, 5);
  scn.resolve();
  preset.points.push_back({"poisson-bias", std::move(scn)});
  return preset;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> all;
  all.push_back(make_fig3());
  all.push_back(make_fig4());
  all.push_back(make_fig5());
  all.push_back(make_table1());
  all.push_back(attack_matrix(
      "table2", "user-level attacker share across all five schedulers",
      WorkloadKind::kUserAttacker));
  all.push_back(attack_matrix(
      "table3",
      "work-loop attacker percent-of-baseline across all five schedulers",
      WorkloadKind::kWorkLoopAttacker));
  all.push_back(make_kernel_fig());
  all.push_back(make_table5());
  all.push_back(make_leak_bound());
  all.push_back(make_poisson_bias());
  return all;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> kPresets = build_presets();
  return kPresets;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& preset : presets()) {
    if (preset.name == name) return &preset;
  }
  return nullptr;
}

}  // namespace credsim
