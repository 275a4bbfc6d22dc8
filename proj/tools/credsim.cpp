// Command line front end: runs scenario files, built-in presets, and
// parameter sweeps, emitting CSV or JSON reports.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "credsim/error.hpp"
#include "credsim/report.hpp"
#include "credsim/runner.hpp"
#include "credsim/scenario.hpp"

namespace {

using namespace credsim;

struct GlobalOpts {
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  std::string format = "csv";
  std::string out;
};

void add_global_opts(CLI::App* cmd, GlobalOpts& opts) {
  cmd->add_option("--seed", opts.seed, "Override the scenario seed");
  cmd->add_option("--replicas", opts.replicas,
                  "Override the scenario replica count");
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", opts.out, "Output path (default: stdout)");
}

// Seed precedence: --seed, then the scenario file, then SIM_SEED, then 1.
// A scenario that sets its own seed keeps it unless --seed is given.
std::optional<std::uint64_t> env_seed() {
  const char* env = std::getenv("SIM_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw ConfigError(std::string("SIM_SEED: not an integer: ") + env);
  }
}

void apply_overrides(Scenario& scn, const GlobalOpts& opts,
                     bool scenario_sets_seed) {
  if (opts.seed) {
    scn.seed = *opts.seed;
  } else if (!scenario_sets_seed) {
    if (const auto seed = env_seed()) scn.seed = *seed;
  }
  if (opts.replicas) scn.replicas = *opts.replicas;
}

bool text_sets_seed(const std::string& path) {
  // Presets never set an explicit seed; scenario files may.
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key == "seed") return true;
  }
  return false;
}

void emit(const std::vector<RunReport>& reports, const GlobalOpts& opts) {
  const std::string content =
      opts.format == "json" ? json_string(reports) : csv_string(reports);
  write_output(opts.out, content, std::cout);
}

std::vector<std::string> split_values(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"credsim: discrete-event simulator of credit-based "
               "hypervisor CPU scheduling and sampling-evasion workloads"};
  app.require_subcommand(1);

  GlobalOpts run_opts, preset_opts, sweep_opts;
  std::string run_path, preset_name, sweep_path, sweep_param, sweep_values;
  std::string validate_path;

  CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario file");
  run_cmd->add_option("scenario", run_path, "Scenario file")->required();
  add_global_opts(run_cmd, run_opts);

  CLI::App* preset_cmd =
      app.add_subcommand("preset", "Run a built-in preset");
  preset_cmd->add_option("name", preset_name, "Preset name")->required();
  add_global_opts(preset_cmd, preset_opts);

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Run a scenario once per value of a numeric field");
  sweep_cmd->add_option("scenario", sweep_path, "Scenario file")->required();
  sweep_cmd->add_option("--param", sweep_param, "Scenario key to sweep")
      ->required();
  sweep_cmd
      ->add_option("--values", sweep_values, "Comma-separated value list")
      ->required();
  add_global_opts(sweep_cmd, sweep_opts);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("scenario", validate_path, "Scenario file")
      ->required();

  CLI::App* list_cmd =
      app.add_subcommand("list-presets", "List built-in presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      Scenario scn = load_scenario(run_path);
      apply_overrides(scn, run_opts, text_sets_seed(run_path));
      std::vector<RunReport> reports;
      reports.push_back(run_scenario(scn, run_path));
      emit(reports, run_opts);
    } else if (preset_cmd->parsed()) {
      const Preset* preset = find_preset(preset_name);
      if (preset == nullptr) {
        std::cerr << "unknown preset '" << preset_name
                  << "'; see list-presets\n";
        return 1;
      }
      std::vector<PresetPoint> points = preset->points;
      for (auto& point : points) {
        apply_overrides(point.scenario, preset_opts, false);
      }
      emit(run_points(points), preset_opts);
    } else if (sweep_cmd->parsed()) {
      Scenario scn = load_scenario(sweep_path);
      apply_overrides(scn, sweep_opts, text_sets_seed(sweep_path));
      const auto points = sweep_points(scn, sweep_param,
                                       split_values(sweep_values), sweep_path);
      emit(run_points(points), sweep_opts);
    } else if (validate_cmd->parsed()) {
      load_scenario(validate_path);
      std::cout << validate_path << ": OK\n";
    } else if (list_cmd->parsed()) {
      for (const Preset& preset : presets()) {
        std::cout << preset.name << " (" << preset.points.size()
                  << " points): " << preset.description << "\n";
      }
    }
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const SimError& err) {
    std::cerr << "simulation failure: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
