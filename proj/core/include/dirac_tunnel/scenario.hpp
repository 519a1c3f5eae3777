#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dirac_tunnel/table_output.hpp"
#include "dirac_tunnel/transit_analysis.hpp"
#include "dirac_tunnel/wavepacket.hpp"

namespace dirac_tunnel {

enum class Scenario { kFig1Filter, kFig2Peaks, kFig3Times, kFig4Transit, kTable1, kCustom };
enum class OutputFormat { kCsv, kJson };

std::string_view to_string(Scenario scenario);
std::optional<Scenario> parse_scenario(std::string_view name);

/// Fully defaulted and validated description of one reproducible run.
struct ScenarioConfig {
  Scenario scenario = Scenario::kCustom;

  struct Physics {
    double v0 = 1.0;
    double mass = 1.0;
    double p0 = 0.86602540378443865;  // sqrt(3)/2
    double d = 10.0;
  } physics;

  struct Geometry {
    std::vector<double> widths;     // L values
    std::vector<double> detectors;  // D values
    double offset = 0.0;
  } geometry;

  struct Numerics {
    std::size_t nodes = 2048;
    double tolerance = 1e-10;
    double t_min = -100.0;
    double t_max = 100.0;
    double t_step = 0.25;
    double time_tol = 1e-3;
    double min_prominence = 0.1;
    double min_relative_density = 1e-15;
    std::size_t samples = 401;  // momentum samples for distribution curves
    Normalization normalization = Normalization::kRaw;
  } numerics;

  struct Output {
    std::string directory = "out";
    OutputFormat format = OutputFormat::kCsv;
  } output;

  BarrierConfig barrier(double width) const;
  PacketSpec packet() const;
  ScanOptions scan_options() const;
};

/// Parses the sectioned key = value format
///
///   scenario = table1
///   [physics]   v0, mass, p0, d
///   [geometry]  L, D (lists: "10, 20, 30" or "start:stop:step"), offset
///   [numerics]  nodes, tolerance, t_min, t_max, t_step, time_tol,
///               min_prominence, min_relative_density, samples,
///               normalization (raw | momentum_norm2)
///   [output]    directory, format (csv | json)
///
/// `overrides` are "section.key" -> value pairs applied on top of the text
/// (top-level keys have no section prefix). Unset fields take the
/// scenario's defaults. Throws ConfigError naming the line/column for
/// syntax errors and the field for bound violations.
ScenarioConfig validate_config(std::string_view text,
                               const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Parses "a:b:step" (inclusive) or a comma list, optionally in brackets.
std::vector<double> parse_real_list(std::string_view text);

struct ManifestFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

struct ManifestFailure {
  std::string cell;
  std::string kind;  // "accuracy" | "empty_result" | "domain" | ...
  std::string message;
};

struct Manifest {
  std::string scenario;
  std::vector<ManifestFile> files;
  std::vector<ManifestFailure> failures;
  std::string json;  // manifest.json contents as written

  bool ok() const noexcept { return failures.empty(); }
};

/// Runs the scenario, writing its tables, a gnuplot script and finally
/// manifest.json into cfg.output.directory (created if missing). Cells that
/// fail numerically are recorded in the manifest instead of aborting the
/// run. Output bytes depend only on the config.
Manifest run_scenario(const ScenarioConfig& cfg);

/// The tables a scenario produces, keyed by file name, without touching
/// the filesystem.
struct ScenarioTables {
  std::map<std::string, Table> tables;
  std::vector<ManifestFailure> failures;
};

ScenarioTables compute_scenario(const ScenarioConfig& cfg);

}  // namespace dirac_tunnel
