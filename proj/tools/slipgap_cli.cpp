// Command-line scenario runner.
//
//   slipgap run <scenario-file> [--out dir] [--controller none|mpc|conventional]
//                               [--mu f] [--seed n]
//   slipgap compare <scenario-file> [--out dir] [--mu f]
//   slipgap sweep <scenario-file> --param name --values v1,v2,... [--out dir]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slipgap/harness.hpp"

namespace fs = std::filesystem;
using namespace slipgap;

namespace {

struct Inputs {
  VehicleParams vehicle;
  MotorTorqueCurve motor;
  Scenario scenario;
};

Inputs load(const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  Config cfg = Config::parse_file(path);
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  Inputs in{vehicle_from_config(cfg), motor_from_config(cfg), scenario_from_config(cfg)};
  return in;
}

void write_run(const fs::path& dir, const std::string& tag, const RunResult& res) {
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / (tag + ".csv"), std::ios::binary);
    write_csv(csv, res.telemetry);
  }
  {
    std::ofstream sum(dir / (tag + "_summary.txt"), std::ios::binary);
    write_summary(sum, res.summary);
  }
  std::cout << tag << ": max|a_y| = " << res.summary.max_abs_ay_g << " g";
  if (std::isfinite(res.summary.improvement_pct))
    std::cout << ", improvement = " << res.summary.improvement_pct << " %";
  if (res.summary.unstable) std::cout << " [UNSTABLE]";
  std::cout << "\n";
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Handling-characteristics cornering controller scenario runner"};
  app.require_subcommand(1);

  std::string scenario_file, out_dir = "out", controller, mu_override;
  long seed = 0;  // reserved for future noise injection; runs are deterministic

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_file, "scenario/config file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--mu", mu_override, "override scenario.mu");
    cmd->add_option("--seed", seed, "RNG seed (reserved; simulations are deterministic)");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario and write CSV + summary");
  add_common(run_cmd);
  run_cmd->add_option("--controller", controller, "override controller (none|mpc|conventional)");

  CLI::App* cmp_cmd = app.add_subcommand("compare", "paired runs: none vs mpc vs conventional");
  add_common(cmp_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the scenario across parameter values");
  add_common(sweep_cmd);
  std::string sweep_param, sweep_values;
  sweep_cmd->add_option("--param", sweep_param, "config key to sweep")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::pair<std::string, std::string>> overrides;
    if (!mu_override.empty()) overrides.emplace_back("scenario.mu", mu_override);

    if (run_cmd->parsed()) {
      if (!controller.empty()) overrides.emplace_back("scenario.controller", controller);
      const Inputs in = load(scenario_file, overrides);
      const RunResult res = run_scenario(in.scenario, in.vehicle, in.motor);
      write_run(out_dir, in.scenario.name + "_" + controller_to_string(in.scenario.controller), res);
    } else if (cmp_cmd->parsed()) {
      const Inputs in = load(scenario_file, overrides);
      const ComparisonReport rep = compare_controllers(in.scenario, in.vehicle, in.motor);
      write_run(out_dir, in.scenario.name + "_none", rep.uncontrolled);
      write_run(out_dir, in.scenario.name + "_mpc", rep.mpc);
      write_run(out_dir, in.scenario.name + "_conventional", rep.conventional);
      std::cout << "saturation-oscillation events: mpc = "
                << rep.mpc.summary.saturation_oscillation_events << ", conventional = "
                << rep.conventional.summary.saturation_oscillation_events << "\n";
    } else if (sweep_cmd->parsed()) {
      for (const std::string& v : split_csv_list(sweep_values)) {
        auto ov = overrides;
        ov.emplace_back(sweep_param, v);
        const Inputs in = load(scenario_file, ov);
        const RunResult res = run_scenario(in.scenario, in.vehicle, in.motor);
        std::string tag = in.scenario.name + "_" + controller_to_string(in.scenario.controller) +
                          "_" + sweep_param + "=" + v;
        for (char& c : tag)
          if (c == '/' || c == ' ') c = '_';
        write_run(out_dir, tag, res);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
