#include "credsim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "credsim/error.hpp"

namespace credsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(key + ": expected integer, got '" + value + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw ConfigError(key + ": expected true|false, got '" + value + "'");
}

JitterSpec parse_jitter(const std::string& key, const std::string& value) {
  if (value == "none") return {};
  const auto colon = value.find(':');
  if (colon != std::string::npos) {
    const std::string head = value.substr(0, colon);
    const double param = parse_double(key, value.substr(colon + 1));
    if (param < 0) throw ConfigError(key + ": jitter must be >= 0");
    if (head == "uniform") return {JitterKind::kUniform, param};
    if (head == "gaussian") return {JitterKind::kGaussian, param};
  }
  throw ConfigError(key + ": expected none|uniform:<us>|gaussian:<us>, got '" +
                    value + "'");
}

// Defaults that differ by workload kind. The kernel-level attacker needs a
// larger sacrificed slice and sees coarser timing than the user-level one.
WorkloadSpec kind_defaults(WorkloadKind kind) {
  WorkloadSpec spec;
  spec.kind = kind;
  if (kind == WorkloadKind::kKernelAttacker) {
    spec.spin = 8'000;
    spec.sleep_request = 1'200;
    spec.jitter = {JitterKind::kUniform, 500.0};
  }
  return spec;
}

struct KeyRef {
  enum class Field {
    kPcpus, kHorizonMs, kWarmupMs, kSeed, kReplicas,
    kVariant, kMode, kCap, kFastTick, kReschedTick, kDebit, kMaxCredits,
    kBernoulliSlot, kBernoulliP, kUniformQuantum, kBoost,
    kVmKind, kVmPcpu, kVmSpin, kVmSleepRequest, kVmGuestTick,
    kVmCheckGranularity, kVmLoopsPerUs, kVmJitter, kVmMessageCost,
    kVmPingInterval, kVmPeer, kVmPhaseOffset,
  };
  Field field;
  int vm = -1;
  bool numeric = false;
};

KeyRef resolve_key(const std::string& key) {
  using F = KeyRef::Field;
  if (key == "pcpus") return {F::kPcpus, -1, true};
  if (key == "horizon_ms") return {F::kHorizonMs, -1, true};
  if (key == "warmup_ms") return {F::kWarmupMs, -1, true};
  if (key == "seed") return {F::kSeed, -1, true};
  if (key == "replicas") return {F::kReplicas, -1, true};
  if (key == "scheduler.variant") return {F::kVariant, -1, false};
  if (key == "scheduler.mode") return {F::kMode, -1, false};
  if (key == "scheduler.cap_percent") return {F::kCap, -1, true};
  if (key == "scheduler.fast_tick_us") return {F::kFastTick, -1, true};
  if (key == "scheduler.reschedule_tick_us") return {F::kReschedTick, -1, true};
  if (key == "scheduler.debit_per_sample") return {F::kDebit, -1, true};
  if (key == "scheduler.max_credits") return {F::kMaxCredits, -1, true};
  if (key == "scheduler.bernoulli_slot_us") return {F::kBernoulliSlot, -1, true};
  if (key == "scheduler.bernoulli_p") return {F::kBernoulliP, -1, true};
  if (key == "scheduler.uniform_quantum_us") {
    return {F::kUniformQuantum, -1, true};
  }
  if (key == "scheduler.boost") return {F::kBoost, -1, false};

  if (key.rfind("vm.", 0) == 0) {
    const auto second = key.find('.', 3);
    if (second != std::string::npos) {
      const std::string idx_str = key.substr(3, second - 3);
      int vm = -1;
      try {
        vm = static_cast<int>(parse_int(key, idx_str));
      } catch (const ConfigError&) {
        vm = -1;
      }
      if (vm >= 0) {
        const std::string field = key.substr(second + 1);
        if (field == "kind") return {F::kVmKind, vm, false};
        if (field == "pcpu") return {F::kVmPcpu, vm, true};
        if (field == "spin_us") return {F::kVmSpin, vm, true};
        if (field == "sleep_request_us") return {F::kVmSleepRequest, vm, true};
        if (field == "guest_tick_us") return {F::kVmGuestTick, vm, true};
        if (field == "check_granularity") {
          return {F::kVmCheckGranularity, vm, true};
        }
        if (field == "loops_per_us") return {F::kVmLoopsPerUs, vm, true};
        if (field == "jitter") return {F::kVmJitter, vm, false};
        if (field == "message_cost_us") return {F::kVmMessageCost, vm, true};
        if (field == "ping_interval_us") return {F::kVmPingInterval, vm, true};
        if (field == "peer") return {F::kVmPeer, vm, true};
        if (field == "phase_offset_us") return {F::kVmPhaseOffset, vm, true};
      }
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

WorkloadSpec& vm_spec(Scenario& scn, const std::string& key, int vm) {
  if (vm >= static_cast<int>(scn.vms.size())) {
    throw ConfigError(key + ": vm." + std::to_string(vm) +
                      ".kind must come first (vm indices are contiguous)");
  }
  return scn.vms[vm].spec;
}

Micros ms_to_us(const std::string& key, const std::string& value) {
  const double ms = parse_double(key, value);
  if (ms < 0) throw ConfigError(key + ": must be >= 0");
  return static_cast<Micros>(std::llround(ms * 1000.0));
}

}  // namespace

void apply_key(Scenario& scn, const std::string& key,
               const std::string& value) {
  using F = KeyRef::Field;
  const KeyRef ref = resolve_key(key);
  switch (ref.field) {
    case F::kPcpus:
      scn.pcpus = static_cast<int>(parse_int(key, value));
      break;
    case F::kHorizonMs:
      scn.horizon = ms_to_us(key, value);
      break;
    case F::kWarmupMs:
      scn.warmup = ms_to_us(key, value);
      break;
    case F::kSeed:
      scn.seed = static_cast<std::uint64_t>(parse_int(key, value));
      break;
    case F::kReplicas:
      scn.replicas = static_cast<int>(parse_int(key, value));
      break;
    case F::kVariant:
      scn.sched.variant = variant_from_string(value);
      break;
    case F::kMode:
      scn.sched.mode = mode_from_string(value);
      break;
    case F::kCap:
      scn.sched.cap_percent = parse_double(key, value);
      break;
    case F::kFastTick:
      scn.sched.fast_tick = parse_int(key, value);
      break;
    case F::kReschedTick:
      scn.sched.reschedule_tick = parse_int(key, value);
      break;
    case F::kDebit:
      scn.sched.debit_per_sample = parse_int(key, value);
      break;
    case F::kMaxCredits:
      scn.sched.max_credits = parse_int(key, value);
      break;
    case F::kBernoulliSlot:
      scn.sched.bernoulli_slot = parse_int(key, value);
      break;
    case F::kBernoulliP:
      scn.sched.bernoulli_p = parse_double(key, value);
      break;
    case F::kUniformQuantum:
      scn.sched.uniform_quantum = parse_int(key, value);
      break;
    case F::kBoost:
      scn.sched.boost_enabled = parse_bool(key, value);
      break;
    case F::kVmKind: {
      if (ref.vm != static_cast<int>(scn.vms.size())) {
        if (ref.vm < static_cast<int>(scn.vms.size())) {
          throw ConfigError(key + ": kind already set for this vm");
        }
        throw ConfigError(key + ": vm indices must be contiguous from 0");
      }
      VmConfig vm;
      vm.spec = kind_defaults(workload_kind_from_string(value));
      scn.vms.push_back(std::move(vm));
      break;
    }
    case F::kVmPcpu:
      if (ref.vm >= static_cast<int>(scn.vms.size())) {
        throw ConfigError(key + ": vm." + std::to_string(ref.vm) +
                          ".kind must come first");
      }
      scn.vms[ref.vm].pcpu = static_cast<int>(parse_int(key, value));
      break;
    case F::kVmSpin:
      vm_spec(scn, key, ref.vm).spin = parse_int(key, value);
      break;
    case F::kVmSleepRequest:
      vm_spec(scn, key, ref.vm).sleep_request = parse_int(key, value);
      break;
    case F::kVmGuestTick:
      vm_spec(scn, key, ref.vm).guest_tick = parse_int(key, value);
      break;
    case F::kVmCheckGranularity:
      vm_spec(scn, key, ref.vm).check_granularity = parse_int(key, value);
      break;
    case F::kVmLoopsPerUs:
      vm_spec(scn, key, ref.vm).loops_per_us = parse_double(key, value);
      break;
    case F::kVmJitter:
      vm_spec(scn, key, ref.vm).jitter = parse_jitter(key, value);
      break;
    case F::kVmMessageCost:
      vm_spec(scn, key, ref.vm).message_cost = parse_int(key, value);
      break;
    case F::kVmPingInterval:
      vm_spec(scn, key, ref.vm).ping_interval = parse_int(key, value);
      break;
    case F::kVmPeer:
      vm_spec(scn, key, ref.vm).peer = static_cast<int>(parse_int(key, value));
      break;
    case F::kVmPhaseOffset:
      vm_spec(scn, key, ref.vm).phase_offset = parse_int(key, value);
      break;
  }
}

bool is_numeric_key(const std::string& key) {
  try {
    return resolve_key(key).numeric;
  } catch (const ConfigError&) {
    return false;
  }
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Scenario scn;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    try {
      apply_key(scn, key, value);
    } catch (const ConfigError& err) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " +
                        err.what());
    }
  }
  scn.resolve();
  return scn;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

void Scenario::resolve() {
  if (pcpus <= 0) throw ConfigError("pcpus must be positive");
  if (vms.empty()) throw ConfigError("scenario needs at least one vm");
  if (replicas <= 0) throw ConfigError("replicas must be positive");
  if (horizon <= warmup) throw ConfigError("horizon must exceed warmup");
  sched.validate();
  int next = 0;
  for (auto& vm : vms) {
    if (vm.pcpu < 0) {
      vm.pcpu = next;
      next = (next + 1) % pcpus;
    }
    if (vm.pcpu >= pcpus) {
      throw ConfigError("vm assigned to pcpu " + std::to_string(vm.pcpu) +
                        " but scenario has " + std::to_string(pcpus));
    }
    vm.spec.validate();
  }
  for (int i = 0; i < static_cast<int>(vms.size()); ++i) {
    const WorkloadSpec& spec = vms[i].spec;
    if (spec.kind != WorkloadKind::kPinger &&
        spec.kind != WorkloadKind::kPonger) {
      continue;
    }
    if (spec.peer < 0 || spec.peer >= static_cast<int>(vms.size()) ||
        spec.peer == i) {
      throw ConfigError("vm " + std::to_string(i) + ": invalid peer");
    }
    const WorkloadKind expected = spec.kind == WorkloadKind::kPinger
                                      ? WorkloadKind::kPonger
                                      : WorkloadKind::kPinger;
    if (vms[spec.peer].spec.kind != expected ||
        vms[spec.peer].spec.peer != i) {
      throw ConfigError("vm " + std::to_string(i) +
                        ": peer must point back from a matching " +
                        std::string(to_string(expected)));
    }
  }
}

std::vector<VmSetup> Scenario::setups() const {
  std::vector<VmSetup> out;
  out.reserve(vms.size());
  for (const auto& vm : vms) out.push_back({vm.spec, vm.pcpu});
  return out;
}

}  // namespace credsim
