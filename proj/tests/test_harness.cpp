#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "credsim/error.hpp"
#include "credsim/report.hpp"
#include "credsim/runner.hpp"
#include "credsim/scenario.hpp"

using namespace credsim;

namespace {

Scenario parse(const std::string& text) {
  return parse_scenario(text, "test.scn");
}

const std::string kMinimal =
    "pcpus = 1\n"
    "horizon_ms = 1000\n"
    "vm.0.kind = cpu-hog\n";

}  // namespace

TEST_CASE("minimal scenario resolves with stock defaults") {
  const Scenario scn = parse(kMinimal);
  CHECK(scn.pcpus == 1);
  CHECK(scn.vms.size() == 1);
  CHECK(scn.horizon == 1'000'000);
  CHECK(scn.sched.variant == Variant::kCredit);
  CHECK(scn.sched.mode == SchedMode::kWorkConserving);
  CHECK(scn.sched.fast_tick == 10'000);
  CHECK(scn.sched.reschedule_tick == 30'000);
  CHECK(scn.sched.debit_per_sample == 100);
  CHECK(scn.sched.max_credits == 300);
  CHECK(scn.sched.bernoulli_slot == 1'000);
  CHECK(scn.sched.bernoulli_p == doctest::Approx(0.1));
  CHECK(scn.sched.uniform_quantum == 1'000);
  CHECK(scn.warmup == 300'000);
  CHECK(scn.replicas == 1);
}

TEST_CASE("nwc mode without a cap is rejected with a clear message") {
  const std::string text = kMinimal + "scheduler.mode = nwc\n";
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("cap required"),
                       ConfigError);
}

TEST_CASE("unknown keys are rejected with the line number") {
  const std::string text = kMinimal + "schedulr.variant = credit\n";
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("test.scn:4"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("unknown key"),
                       ConfigError);
}

TEST_CASE("vm settings before the kind line are rejected") {
  CHECK_THROWS_AS(parse("pcpus = 1\n"
                        "horizon_ms = 1000\n"
                        "vm.0.spin_us = 9000\n"
                        "vm.0.kind = user-attacker\n"),
                  ConfigError);
}

TEST_CASE("kernel attacker kind applies its own defaults") {
  const Scenario scn = parse(
      "pcpus = 1\nhorizon_ms = 1000\nvm.0.kind = kernel-attacker\n");
  CHECK(scn.vms[0].spec.spin == 8'000);
  CHECK(scn.vms[0].spec.jitter.kind == JitterKind::kUniform);
  CHECK(scn.vms[0].spec.jitter.param_us == doctest::Approx(500.0));
}

TEST_CASE("bad enum values point at the offending key") {
  CHECK_THROWS_WITH_AS(
      parse(kMinimal + "scheduler.variant = fifo\n"),
      doctest::Contains("unknown scheduler variant"), ConfigError);
  CHECK_THROWS_AS(parse(kMinimal + "vm.0.jitter = lots\n"), ConfigError);
}

TEST_CASE("horizon must exceed warmup") {
  CHECK_THROWS_AS(parse("pcpus = 1\nhorizon_ms = 0.2\nwarmup_ms = 0.3\n"
                        "vm.0.kind = cpu-hog\n"),
                  ConfigError);
}

TEST_CASE("vms cannot reference missing pcpus") {
  CHECK_THROWS_AS(parse(kMinimal + "vm.0.pcpu = 3\n"), ConfigError);
}

TEST_CASE("ping-pong peers must be mutual") {
  CHECK_THROWS_AS(parse("pcpus = 1\nhorizon_ms = 1000\n"
                        "vm.0.kind = pinger\nvm.0.peer = 1\n"
                        "vm.1.kind = cpu-hog\n"),
                  ConfigError);
}

TEST_CASE("missing scenario files surface the path") {
  CHECK_THROWS_WITH_AS(load_scenario("/nonexistent/x.scn"),
                       doctest::Contains("/nonexistent/x.scn"), ConfigError);
}

TEST_CASE("every documented preset exists") {
  for (const char* name :
       {"fig3", "fig4", "fig5", "table1", "table2", "table3", "kernel-fig",
        "table5-relative", "leak-bound", "poisson-bias"}) {
    const Preset* preset = find_preset(name);
    REQUIRE_MESSAGE(preset != nullptr, name);
    CHECK(!preset->points.empty());
    for (const auto& point : preset->points) {
      CHECK(point.scenario.replicas >= 1);
      CHECK(point.scenario.horizon > point.scenario.warmup);
    }
  }
  CHECK(find_preset("nope") == nullptr);
}

TEST_CASE("table2 covers all five schedulers with six vms each") {
  const Preset* preset = find_preset("table2");
  REQUIRE(preset != nullptr);
  REQUIRE(preset->points.size() == 5);
  for (const auto& point : preset->points) {
    CHECK(point.scenario.vms.size() == 6);
    CHECK(point.scenario.pcpus == 2);
  }
}

TEST_CASE("sweep expands numeric keys and rejects the rest") {
  Scenario base = parse(
      "pcpus = 1\nhorizon_ms = 100\nwarmup_ms = 0\n"
      "vm.0.kind = user-attacker\n");
  const auto points = sweep_points(base, "vm.0.spin_us",
                                   {"7000", "8000", "9000"}, "sweep");
  REQUIRE(points.size() == 3);
  CHECK(points[0].scenario.vms[0].spec.spin == 7'000);
  CHECK(points[2].scenario.vms[0].spec.spin == 9'000);
  CHECK(points[1].id == "sweep[vm.0.spin_us=8000]");

  CHECK_THROWS_AS(sweep_points(base, "scheduler.variant", {"exact"}, "s"),
                  ConfigError);
  CHECK_THROWS_AS(sweep_points(base, "vm.0.spin_us", {}, "s"), ConfigError);
  CHECK_THROWS_AS(sweep_points(base, "vm.0.spin_us", {"abc"}, "s"),
                  ConfigError);
}

TEST_CASE("single-value sweep equals a plain run") {
  Scenario base = parse(
      "pcpus = 1\nhorizon_ms = 500\nwarmup_ms = 0\nseed = 3\n"
      "vm.0.kind = cpu-hog\n");
  const auto points = sweep_points(base, "vm.0.spin_us", {"9000"}, "x");
  const RunReport via_sweep = run_scenario(points[0].scenario, "same");
  const RunReport direct = run_scenario(base, "same");
  CHECK(via_sweep.trace_hash0 == direct.trace_hash0);
  CHECK(via_sweep.vms[0].share == direct.vms[0].share);
}

TEST_CASE("csv emits the pinned columns and one idle row per scenario") {
  Scenario scn = parse(
      "pcpus = 1\nhorizon_ms = 500\nwarmup_ms = 100\nreplicas = 2\n"
      "vm.0.kind = cpu-hog\nvm.1.kind = cpu-hog\n");
  std::vector<RunReport> reports{run_scenario(scn, "tiny")};
  const std::string csv = csv_string(reports);
  std::istringstream is(csv);
  std::string header;
  std::getline(is, header);
  CHECK(header ==
        "scenario-id,scheduler,vm-id,role,share,pct-baseline,"
        "charge-bias-\xC2\xB5s,debits,ci-half-width");
  std::vector<std::string> rows;
  std::string row;
  while (std::getline(is, row)) rows.push_back(row);
  REQUIRE(rows.size() == 3);  // two vms + idle
  CHECK(rows[0].rfind("tiny,credit,0,cpu-hog,", 0) == 0);
  CHECK(rows[2].rfind("tiny,credit,-1,idle,", 0) == 0);
}

TEST_CASE("csv shares plus idle add up to the pcpu count") {
  Scenario scn = parse(
      "pcpus = 2\nhorizon_ms = 2000\nwarmup_ms = 200\nreplicas = 2\n"
      "vm.0.kind = user-attacker\nvm.1.kind = cpu-hog\nvm.2.kind = cpu-hog\n");
  std::vector<RunReport> reports{run_scenario(scn, "cons")};
  const std::string csv = csv_string(reports);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // header
  double total = 0.0;
  int rows = 0;
  while (std::getline(is, line)) {
    // share is column 5
    std::istringstream cols(line);
    std::string cell;
    for (int i = 0; i < 5; ++i) std::getline(cols, cell, ',');
    total += std::stod(cell);
    ++rows;
  }
  CHECK(rows == 4);
  CHECK(std::abs(total - 2.0) < 1e-4 * rows);
}

TEST_CASE("json reports round-trip structurally") {
  Scenario scn = parse(
      "pcpus = 1\nhorizon_ms = 500\nwarmup_ms = 100\nreplicas = 2\n"
      "vm.0.kind = cpu-hog\n");
  std::vector<RunReport> reports{run_scenario(scn, "rt")};
  const std::string once = json_string(reports);
  const std::vector<RunReport> parsed = reports_from_json_string(once);
  REQUIRE(parsed.size() == 1);
  const std::string twice = json_string(parsed);
  CHECK(once == twice);
}

TEST_CASE("equal seeds give byte-identical csv output") {
  Scenario scn = parse(
      "pcpus = 2\nhorizon_ms = 3000\nwarmup_ms = 300\nreplicas = 3\n"
      "seed = 11\nscheduler.variant = poisson\n"
      "vm.0.kind = user-attacker\nvm.1.kind = cpu-hog\nvm.2.kind = cpu-hog\n");
  std::vector<RunReport> a{run_scenario(scn, "det")};
  std::vector<RunReport> b{run_scenario(scn, "det")};
  CHECK(csv_string(a) == csv_string(b));
  CHECK(a[0].trace_hash0 == b[0].trace_hash0);
}

TEST_CASE("reports surface conservation and replica counts") {
  Scenario scn = parse(
      "pcpus = 1\nhorizon_ms = 500\nwarmup_ms = 0\nreplicas = 4\n"
      "vm.0.kind = cpu-hog\n");
  const RunReport rep = run_scenario(scn, "meta");
  CHECK(rep.conservation_exact);
  CHECK(rep.replicas == 4);
  CHECK(rep.vms[0].share_s.n == 4);
  CHECK(rep.vms[0].share_s.mean == doctest::Approx(1.0));
  CHECK(rep.idle_s.mean == doctest::Approx(0.0));
}

TEST_CASE("write_output reports unwritable paths") {
  std::ostringstream sink;
  CHECK_THROWS_WITH_AS(
      write_output("/nonexistent-dir/report.csv", "x", sink),
      doctest::Contains("/nonexistent-dir/report.csv"), ConfigError);
  write_output("", "to-stream", sink);
  CHECK(sink.str() == "to-stream");
}
