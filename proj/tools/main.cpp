// dirac-tunnel: regenerate scenario tables from the command line.
//
//   dirac-tunnel run --scenario table1 --out DIR [--config FILE] [--set key=value]...
//   dirac-tunnel sweep --L 10:100:5 [--D 40,60] --out DIR [--config FILE] [--set key=value]...
//
// Exit status: 0 success, 2 invalid configuration, 3 numeric non-convergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "dirac_tunnel/errors.hpp"
#include "dirac_tunnel/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNonConvergence = 3;

struct CommonArgs {
  std::string config_file;
  std::string out;
  std::string scenario;
  std::vector<std::string> sets;
};

void add_common(CLI::App& cmd, CommonArgs& args) {
  cmd.add_option("--config", args.config_file, "Configuration file ([physics], [geometry], [numerics], [output])");
  cmd.add_option("--out", args.out, "Output directory");
  cmd.add_option("--set", args.sets, "Override a field, e.g. physics.v0=2 or geometry.L=10,20")->take_all();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dirac_tunnel::ConfigError("cannot read config file '" + path + "'", "config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::pair<std::string, std::string>> collect_overrides(const CommonArgs& args) {
  std::vector<std::pair<std::string, std::string>> out;
  if (!args.scenario.empty()) out.emplace_back("scenario", args.scenario);
  for (const std::string& s : args.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw dirac_tunnel::ConfigError("--set expects key=value, got '" + s + "'", s);
    }
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!args.out.empty()) out.emplace_back("output.directory", args.out);
  return out;
}

int execute(const CommonArgs& args, std::vector<std::pair<std::string, std::string>> extra) {
  using namespace dirac_tunnel;
  ScenarioConfig cfg;
  try {
    const std::string text = args.config_file.empty() ? std::string{} : read_file(args.config_file);
    auto overrides = std::move(extra);
    const auto user = collect_overrides(args);
    overrides.insert(overrides.end(), user.begin(), user.end());
    cfg = validate_config(text, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "dirac-tunnel: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Error& e) {
    std::cerr << "dirac-tunnel: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  }

  const Manifest manifest = run_scenario(cfg);
  for (const ManifestFile& f : manifest.files) std::cout << f.path << "  " << f.sha256 << '\n';
  std::cout << "manifest.json written to " << cfg.output.directory << '\n';
  if (!manifest.ok()) {
    for (const ManifestFailure& f : manifest.failures) {
      std::cerr << "dirac-tunnel: " << f.cell << ": " << f.kind << ": " << f.message << '\n';
    }
    return kExitNonConvergence;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirac wave packet tunneling through a rectangular barrier"};
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run one scenario and write its tables and manifest");
  run->add_option("--scenario", run_args.scenario,
                  "fig1_filter | fig2_peaks | fig3_times | fig4_transit | table1 | custom");
  add_common(*run, run_args);

  CommonArgs sweep_args;
  std::string widths;
  std::string detectors;
  CLI::App* sweep = app.add_subcommand("sweep", "Tunneling times (and transits with --D) over a range of widths");
  sweep->add_option("--L", widths, "Widths as start:stop:step or a comma list")->required();
  sweep->add_option("--D", detectors, "Detector positions; switches to the custom scenario");
  sweep->add_option("--scenario", sweep_args.scenario, "Scenario to sweep (default fig3_times)");
  add_common(*sweep, sweep_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (run->parsed()) {
      if (run_args.scenario.empty() && run_args.config_file.empty()) {
        std::cerr << "dirac-tunnel: run needs --scenario or --config\n";
        return kExitInvalid;
      }
      return execute(run_args, {});
    }
    std::vector<std::pair<std::string, std::string>> extra;
    if (sweep_args.scenario.empty() && sweep_args.config_file.empty()) {
      extra.emplace_back("scenario", detectors.empty() ? "fig3_times" : "custom");
    }
    extra.emplace_back("geometry.L", widths);
    if (!detectors.empty()) extra.emplace_back("geometry.D", detectors);
    return execute(sweep_args, std::move(extra));
  } catch (const std::exception& e) {
    std::cerr << "dirac-tunnel: " << e.what() << '\n';
    return kExitFailure;
  }
}
