#include "credsim/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "credsim/error.hpp"

namespace credsim {

namespace {

std::string fmt(const char* spec, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, value);
  return buf;
}

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

using ordered_json = nlohmann::ordered_json;

ordered_json summary_json(const StatSummary& s) {
  return ordered_json{{"mean", s.mean}, {"ci_half_width", s.half_width},
                      {"n", s.n}};
}

StatSummary summary_from_json(const ordered_json& j) {
  StatSummary s;
  s.mean = j.at("mean").get<double>();
  s.half_width = j.at("ci_half_width").get<double>();
  s.n = j.at("n").get<std::int64_t>();
  return s;
}

ordered_json report_json(const RunReport& rep) {
  ordered_json j;
  j["scenario_id"] = rep.scenario_id;
  j["scheduler"] = to_string(rep.variant);
  j["mode"] = to_string(rep.mode);
  j["pcpus"] = rep.pcpus;
  j["horizon_us"] = rep.horizon;
  j["warmup_us"] = rep.warmup;
  j["seed"] = rep.seed;
  j["replicas"] = rep.replicas;
  j["conservation_exact"] = rep.conservation_exact;
  j["trace_hash"] = hash_hex(rep.trace_hash0);

  ordered_json events;
  for (int k = 0; k < kEventKindCount; ++k) {
    events[to_string(static_cast<EventKind>(k))] = rep.event_counts[k];
  }
  j["event_counts"] = events;

  j["sampler"] = ordered_json{{"samples", rep.sampler.samples},
                              {"intervals", rep.sampler.intervals},
                              {"interval_sum_us", rep.sampler.interval_sum}};

  j["idle"] = ordered_json{{"summary", summary_json(rep.idle_s)},
                           {"share_per_replica", rep.idle_share}};

  ordered_json vms = ordered_json::array();
  for (const VmOutcome& o : rep.vms) {
    ordered_json v;
    v["vm"] = o.vm;
    v["role"] = to_string(o.kind);
    v["share"] = summary_json(o.share_s);
    v["pct_baseline"] = summary_json(o.pct_s);
    v["charge_bias_us"] = summary_json(o.bias_s);
    v["debits"] = summary_json(o.debits_s);
    v["boost_wakes_mean"] = o.boost_wakes_mean;
    v["rtt_us"] = summary_json(o.rtt_s);
    v["share_per_replica"] = o.share;
    v["pct_baseline_per_replica"] = o.pct_baseline;
    v["charge_bias_us_per_replica"] = o.bias_us;
    v["debits_per_replica"] = o.debits;
    v["rtt_us_per_replica"] = o.rtt_mean;
    vms.push_back(std::move(v));
  }
  j["vms"] = std::move(vms);
  return j;
}

RunReport report_from_json(const ordered_json& j) {
  RunReport rep;
  rep.scenario_id = j.at("scenario_id").get<std::string>();
  rep.variant = variant_from_string(j.at("scheduler").get<std::string>());
  rep.mode = mode_from_string(j.at("mode").get<std::string>());
  rep.pcpus = j.at("pcpus").get<int>();
  rep.horizon = j.at("horizon_us").get<Micros>();
  rep.warmup = j.at("warmup_us").get<Micros>();
  rep.seed = j.at("seed").get<std::uint64_t>();
  rep.replicas = j.at("replicas").get<int>();
  rep.conservation_exact = j.at("conservation_exact").get<bool>();
  rep.trace_hash0 =
      std::stoull(j.at("trace_hash").get<std::string>(), nullptr, 16);
  for (int k = 0; k < kEventKindCount; ++k) {
    rep.event_counts[k] =
        j.at("event_counts").at(to_string(static_cast<EventKind>(k)))
            .get<std::int64_t>();
  }
  const auto& sampler = j.at("sampler");
  rep.sampler.samples = sampler.at("samples").get<std::int64_t>();
  rep.sampler.intervals = sampler.at("intervals").get<std::int64_t>();
  rep.sampler.interval_sum = sampler.at("interval_sum_us").get<Micros>();
  rep.idle_s = summary_from_json(j.at("idle").at("summary"));
  rep.idle_share =
      j.at("idle").at("share_per_replica").get<std::vector<double>>();
  for (const auto& v : j.at("vms")) {
    VmOutcome o;
    o.vm = v.at("vm").get<int>();
    o.kind = workload_kind_from_string(v.at("role").get<std::string>());
    o.share_s = summary_from_json(v.at("share"));
    o.pct_s = summary_from_json(v.at("pct_baseline"));
    o.bias_s = summary_from_json(v.at("charge_bias_us"));
    o.debits_s = summary_from_json(v.at("debits"));
    o.boost_wakes_mean = v.at("boost_wakes_mean").get<double>();
    o.rtt_s = summary_from_json(v.at("rtt_us"));
    o.share = v.at("share_per_replica").get<std::vector<double>>();
    o.pct_baseline =
        v.at("pct_baseline_per_replica").get<std::vector<double>>();
    o.bias_us = v.at("charge_bias_us_per_replica").get<std::vector<double>>();
    o.debits = v.at("debits_per_replica").get<std::vector<double>>();
    o.rtt_mean = v.at("rtt_us_per_replica").get<std::vector<double>>();
    rep.vms.push_back(std::move(o));
  }
  return rep;
}

}  // namespace

void write_csv(std::ostream& os, std::span<const RunReport> reports) {
  os << "scenario-id,scheduler,vm-id,role,share,pct-baseline,"
        "charge-bias-\xC2\xB5s,debits,ci-half-width\n";
  for (const RunReport& rep : reports) {
    for (const VmOutcome& o : rep.vms) {
      os << rep.scenario_id << ',' << to_string(rep.variant) << ',' << o.vm
         << ',' << to_string(o.kind) << ',' << fmt("%.6f", o.share_s.mean)
         << ',' << fmt("%.3f", o.pct_s.mean) << ','
         << fmt("%.3f", o.bias_s.mean) << ',' << fmt("%.3f", o.debits_s.mean)
         << ',' << fmt("%.6f", o.share_s.half_width) << '\n';
    }
    os << rep.scenario_id << ',' << to_string(rep.variant)
       << ",-1,idle," << fmt("%.6f", rep.idle_s.mean)
       << ",0.000,0.000,0.000," << fmt("%.6f", rep.idle_s.half_width) << '\n';
  }
}

std::string csv_string(std::span<const RunReport> reports) {
  std::ostringstream os;
  write_csv(os, reports);
  return os.str();
}

std::string json_string(std::span<const RunReport> reports) {
  ordered_json root;
  ordered_json arr = ordered_json::array();
  for (const RunReport& rep : reports) arr.push_back(report_json(rep));
  root["reports"] = std::move(arr);
  return root.dump(2) + "\n";
}

std::vector<RunReport> reports_from_json_string(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const std::exception& err) {
    throw ConfigError(std::string("invalid report json: ") + err.what());
  }
  std::vector<RunReport> out;
  for (const auto& j : root.at("reports")) {
    out.push_back(report_from_json(j));
  }
  return out;
}

void write_output(const std::string& path, const std::string& content,
                  std::ostream& fallback) {
  if (path.empty()) {
    fallback << content;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError(path + ": cannot open for writing");
  os << content;
  if (!os) throw ConfigError(path + ": write failed");
}

}  // namespace credsim
