#include "credsim/runner.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "credsim/error.hpp"
#include "credsim/metrics.hpp"

namespace credsim {

namespace {

struct ReplicaOut {
  UsageLedger usage;
  std::vector<StatAccum> rtt;
  std::array<std::int64_t, kEventKindCount> events{};
  SamplerStats sampler;
  std::uint64_t hash = 0;
};

ReplicaOut run_replica(const Scenario& scn, int replica) {
  Simulation sim(scn.sched, scn.setups(), scn.pcpus,
                 Rng::substream(scn.seed, static_cast<std::uint64_t>(replica)));
  sim.run(scn.horizon, scn.warmup);
  ReplicaOut out;
  out.usage = sim.usage();
  out.rtt.reserve(sim.vm_count());
  for (int vm = 0; vm < sim.vm_count(); ++vm) {
    out.rtt.push_back(sim.rtt_stats(vm));
  }
  out.events = sim.event_counts();
  out.sampler = sim.sampler_stats();
  out.hash = sim.trace_hash();
  return out;
}

StatSummary summarize_or_single(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  if (xs.size() == 1) return {xs[0], 0.0, 1};
  return summarize(xs);
}

}  // namespace

RunReport run_scenario(const Scenario& scenario,
                       const std::string& scenario_id) {
  Scenario scn = scenario;
  scn.resolve();

  const int n = scn.replicas;
  std::vector<ReplicaOut> outs(n);
  const unsigned workers = std::min<unsigned>(
      std::max(1u, std::thread::hardware_concurrency()),
      static_cast<unsigned>(n));
  if (workers <= 1) {
    for (int r = 0; r < n; ++r) outs[r] = run_replica(scn, r);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (;;) {
          const int r = next.fetch_add(1);
          if (r >= n) return;
          try {
            outs[r] = run_replica(scn, r);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  RunReport rep;
  rep.scenario_id = scenario_id;
  rep.variant = scn.sched.variant;
  rep.mode = scn.sched.mode;
  rep.pcpus = scn.pcpus;
  rep.horizon = scn.horizon;
  rep.warmup = scn.warmup;
  rep.seed = scn.seed;
  rep.replicas = n;
  rep.trace_hash0 = outs[0].hash;

  const int vm_count = static_cast<int>(scn.vms.size());
  rep.vms.resize(vm_count);
  for (int vm = 0; vm < vm_count; ++vm) {
    VmOutcome& o = rep.vms[vm];
    o.vm = vm;
    o.kind = scn.vms[vm].spec.kind;
    double boost_sum = 0.0;
    for (const ReplicaOut& out : outs) {
      o.share.push_back(cpu_share(out.usage, vm));
      o.pct_baseline.push_back(percent_of_baseline(out.usage, vm));
      o.bias_us.push_back(
          static_cast<double>(charge_bias_us(out.usage, vm)));
      o.debits.push_back(
          static_cast<double>(out.usage.vms[vm].debit_events));
      boost_sum += static_cast<double>(out.usage.vms[vm].boost_wakes);
      if (out.rtt[vm].n > 0) o.rtt_mean.push_back(out.rtt[vm].mean);
    }
    o.share_s = summarize_or_single(o.share);
    o.pct_s = summarize_or_single(o.pct_baseline);
    o.bias_s = summarize_or_single(o.bias_us);
    o.debits_s = summarize_or_single(o.debits);
    o.rtt_s = summarize_or_single(o.rtt_mean);
    o.boost_wakes_mean = boost_sum / n;
  }
  for (const ReplicaOut& out : outs) {
    rep.idle_share.push_back(static_cast<double>(out.usage.idle) /
                             static_cast<double>(out.usage.window));
    for (int k = 0; k < kEventKindCount; ++k) {
      rep.event_counts[k] += out.events[k];
    }
    rep.sampler.samples += out.sampler.samples;
    rep.sampler.intervals += out.sampler.intervals;
    rep.sampler.interval_sum += out.sampler.interval_sum;
  }
  rep.idle_s = summarize_or_single(rep.idle_share);
  // Simulation::run enforces exact conservation per replica.
  rep.conservation_exact = true;
  return rep;
}

std::vector<RunReport> run_points(const std::vector<PresetPoint>& points) {
  std::vector<RunReport> reports;
  reports.reserve(points.size());
  for (const auto& point : points) {
    reports.push_back(run_scenario(point.scenario, point.id));
  }
  return reports;
}

std::vector<PresetPoint> sweep_points(const Scenario& base,
                                      const std::string& key,
                                      const std::vector<std::string>& values,
                                      const std::string& base_id) {
  if (!is_numeric_key(key)) {
    throw ConfigError("sweep target '" + key + "' is not a numeric field");
  }
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<PresetPoint> points;
  points.reserve(values.size());
  for (const auto& value : values) {
    Scenario scn = base;
    apply_key(scn, key, value);
    scn.resolve();
    points.push_back({base_id + "[" + key + "=" + value + "]", std::move(scn)});
  }
  return points;
}

}  // namespace credsim
