#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "dirac_tunnel/errors.hpp"
#include "dirac_tunnel/scenario.hpp"

namespace dirac_tunnel {

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kFig1Filter: return "fig1_filter";
    case Scenario::kFig2Peaks: return "fig2_peaks";
    case Scenario::kFig3Times: return "fig3_times";
    case Scenario::kFig4Transit: return "fig4_transit";
    case Scenario::kTable1: return "table1";
    case Scenario::kCustom: return "custom";
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::kFig1Filter, Scenario::kFig2Peaks, Scenario::kFig3Times, Scenario::kFig4Transit,
                     Scenario::kTable1, Scenario::kCustom}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

BarrierConfig ScenarioConfig::barrier(double width) const {
  return {physics.v0, width, physics.mass, geometry.offset};
}

PacketSpec ScenarioConfig::packet() const { return make_packet_spec(physics.p0, physics.d, barrier(0.0)); }

ScanOptions ScenarioConfig::scan_options() const {
  ScanOptions scan;
  scan.t_min = numerics.t_min;
  scan.t_max = numerics.t_max;
  scan.step = numerics.t_step;
  scan.time_tol = numerics.time_tol;
  scan.min_prominence = numerics.min_prominence;
  scan.min_relative_density = numerics.min_relative_density;
  scan.normalization = numerics.normalization;
  scan.quadrature.min_nodes = numerics.nodes;
  scan.quadrature.max_nodes = std::max<std::size_t>(numerics.nodes << 8, std::size_t{1} << 19);
  scan.quadrature.rel_tol = numerics.tolerance;
  return scan;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  // of the value
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"scenario"}},
      {"physics", {"v0", "mass", "p0", "d"}},
      {"geometry", {"L", "D", "offset"}},
      {"numerics",
       {"nodes", "tolerance", "t_min", "t_max", "t_step", "time_tol", "min_prominence", "min_relative_density",
        "samples", "normalization"}},
      {"output", {"directory", "format"}},
  };
  return keys;
}

bool is_known(const std::string& section, const std::string& key) {
  const auto it = known_keys().find(section);
  return it != known_keys().end() && it->second.count(key) > 0;
}

std::map<std::string, Entry> parse_entries(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::string section;
  int line_no = 0;
  std::istringstream stream{std::string(text)};
  std::string buffer;
  while (std::getline(stream, buffer)) {
    ++line_no;
    std::string_view raw = buffer;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(fmt::format("line {}: unterminated section header", line_no), {}, line_no, indent);
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().count(section) || section.empty()) {
        throw ConfigError(fmt::format("line {}: unknown section [{}]", line_no, section), section, line_no, indent);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}, column {}: expected 'key = value'", line_no, indent), {}, line_no,
                        indent);
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string field = section.empty() ? key : section + "." + key;
    if (key.empty() || !is_known(section, key)) {
      throw ConfigError(fmt::format("line {}, column {}: unknown key '{}'", line_no, indent, field), field, line_no,
                        indent);
    }
    const auto raw_eq = raw.find('=');
    const auto value_start = raw.find_first_not_of(" \t", raw_eq + 1);
    const auto column = (value_start == std::string_view::npos ? raw_eq : value_start) + 1;
    entries[field] = {std::string(value), line_no, static_cast<int>(column)};
  }
  return entries;
}

[[noreturn]] void reject(const std::string& field, const Entry* entry, const std::string& message) {
  if (entry && entry->line > 0) {
    throw ConfigError(fmt::format("line {}, column {}: {}: {}", entry->line, entry->column, field, message), field,
                      entry->line, entry->column);
  }
  throw ConfigError(fmt::format("{}: {}", field, message), field);
}

double parse_real(std::string_view text, bool* ok) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  *ok = ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(value);
  return value;
}

class EntryReader {
 public:
  explicit EntryReader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  const Entry* find(const std::string& field) const {
    const auto it = entries_.find(field);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void real(const std::string& field, double& out) const {
    if (const Entry* e = find(field)) {
      bool ok = false;
      out = parse_real(e->value, &ok);
      if (!ok) reject(field, e, fmt::format("expected a number, got '{}'", e->value));
    }
  }

  void count(const std::string& field, std::size_t& out) const {
    if (const Entry* e = find(field)) {
      bool ok = false;
      const double v = parse_real(e->value, &ok);
      if (!ok || v < 1.0 || v != std::floor(v)) reject(field, e, fmt::format("expected a positive integer, got '{}'", e->value));
      out = static_cast<std::size_t>(v);
    }
  }

  void list(const std::string& field, std::vector<double>& out) const {
    if (const Entry* e = find(field)) {
      try {
        out = parse_real_list(e->value);
      } catch (const ConfigError& err) {
        reject(field, e, err.what());
      }
    }
  }

 private:
  std::map<std::string, Entry> entries_;
};

void apply_scenario_defaults(ScenarioConfig& cfg) {
  auto& g = cfg.geometry;
  switch (cfg.scenario) {
    case Scenario::kTable1: g.widths = {10, 15, 20, 25, 30, 40, 50, 75, 100}; break;
    case Scenario::kFig2Peaks: g.widths = parse_real_list("10:100:5"); break;
    case Scenario::kFig1Filter: g.widths = {0, 5, 10, 20, 50}; break;
    case Scenario::kFig3Times: g.widths = parse_real_list("2:100:2"); break;
    case Scenario::kFig4Transit: g.widths = {0, 10, 20, 30}; break;
    case Scenario::kCustom: g.widths = {0}; break;
  }
  g.detectors = {40};
  const bool tabulated = cfg.scenario == Scenario::kTable1 || cfg.scenario == Scenario::kFig2Peaks;
  cfg.numerics.normalization = tabulated ? Normalization::kMomentumNorm2 : Normalization::kRaw;
}

}  // namespace

std::vector<double> parse_real_list(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ConfigError(fmt::format("unterminated list '{}'", text));
    text = trim(text.substr(1, text.size() - 2));
  }
  if (text.empty()) throw ConfigError("list must not be empty");
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const auto colon = text.find(':', start);
      bool ok = false;
      parts.push_back(parse_real(text.substr(start, colon - start), &ok));
      if (!ok) throw ConfigError(fmt::format("bad range '{}'", text));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw ConfigError(fmt::format("range '{}' must be start:stop:step with step > 0 and stop >= start", text));
    }
    const double slack = 1e-9 * parts[2];
    for (std::size_t i = 0;; ++i) {
      const double v = parts[0] + parts[2] * static_cast<double>(i);
      if (v > parts[1] + slack) break;
      out.push_back(v);
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    bool ok = false;
    const double v = parse_real(text.substr(start, comma - start), &ok);
    if (!ok) throw ConfigError(fmt::format("bad list element in '{}'", text));
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

ScenarioConfig validate_config(std::string_view text,
                               const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::map<std::string, Entry> entries = parse_entries(text);
  for (const auto& [field, value] : overrides) {
    const auto dot = field.find('.');
    const std::string section = dot == std::string::npos ? "" : field.substr(0, dot);
    const std::string key = dot == std::string::npos ? field : field.substr(dot + 1);
    if (!is_known(section, key)) throw ConfigError(fmt::format("unknown key '{}' in override", field), field);
    entries[field] = {value, 0, 0};
  }
  const EntryReader in(std::move(entries));

  ScenarioConfig cfg;
  if (const Entry* e = in.find("scenario")) {
    const auto s = parse_scenario(e->value);
    if (!s) reject("scenario", e, fmt::format("unknown scenario '{}'", e->value));
    cfg.scenario = *s;
  }
  apply_scenario_defaults(cfg);

  in.real("physics.v0", cfg.physics.v0);
  in.real("physics.mass", cfg.physics.mass);
  in.real("physics.p0", cfg.physics.p0);
  in.real("physics.d", cfg.physics.d);
  in.list("geometry.L", cfg.geometry.widths);
  in.list("geometry.D", cfg.geometry.detectors);
  in.real("geometry.offset", cfg.geometry.offset);
  in.count("numerics.nodes", cfg.numerics.nodes);
  in.real("numerics.tolerance", cfg.numerics.tolerance);
  in.real("numerics.t_min", cfg.numerics.t_min);
  in.real("numerics.t_max", cfg.numerics.t_max);
  in.real("numerics.t_step", cfg.numerics.t_step);
  in.real("numerics.time_tol", cfg.numerics.time_tol);
  in.real("numerics.min_prominence", cfg.numerics.min_prominence);
  in.real("numerics.min_relative_density", cfg.numerics.min_relative_density);
  in.count("numerics.samples", cfg.numerics.samples);
  if (const Entry* e = in.find("numerics.normalization")) {
    if (e->value == "raw") {
      cfg.numerics.normalization = Normalization::kRaw;
    } else if (e->value == "momentum_norm2") {
      cfg.numerics.normalization = Normalization::kMomentumNorm2;
    } else {
      reject("numerics.normalization", e, fmt::format("expected raw or momentum_norm2, got '{}'", e->value));
    }
  }
  if (const Entry* e = in.find("output.directory")) {
    if (e->value.empty()) reject("output.directory", e, "must not be empty");
    cfg.output.directory = e->value;
  }
  if (const Entry* e = in.find("output.format")) {
    if (e->value == "csv") {
      cfg.output.format = OutputFormat::kCsv;
    } else if (e->value == "json") {
      cfg.output.format = OutputFormat::kJson;
    } else {
      reject("output.format", e, fmt::format("expected csv or json, got '{}'", e->value));
    }
  }

  // Physics bounds.
  const auto& ph = cfg.physics;
  if (!(ph.mass > 0.0)) reject("physics.mass", in.find("physics.mass"), fmt::format("must be positive, got {}", ph.mass));
  if (!(ph.v0 >= ph.mass)) {
    reject("physics.v0", in.find("physics.v0"),
           fmt::format("unsupported regime: V0={} must be at least m={} (V0 < m is not modelled)", ph.v0, ph.mass));
  }
  if (!(ph.d > 0.0)) reject("physics.d", in.find("physics.d"), fmt::format("must be positive, got {}", ph.d));
  const MomentumWindow window = momentum_window(cfg.barrier(0.0));
  if (!window.contains(ph.p0)) {
    reject("physics.p0", in.find("physics.p0"),
           fmt::format("p0={} outside the Dirac window [{}, {}]", ph.p0, window.lo, window.hi));
  }

  // Geometry.
  const auto& g = cfg.geometry;
  for (const double l : g.widths) {
    if (!(l >= 0.0)) reject("geometry.L", in.find("geometry.L"), fmt::format("widths must be >= 0, got {}", l));
    const bool needs_positive = cfg.scenario == Scenario::kFig3Times || cfg.scenario == Scenario::kTable1 ||
                                cfg.scenario == Scenario::kFig2Peaks;
    if (needs_positive && !(l > 0.0)) {
      reject("geometry.L", in.find("geometry.L"),
             fmt::format("scenario {} needs positive widths, got {}", to_string(cfg.scenario), l));
    }
  }
  if (g.detectors.empty()) reject("geometry.D", in.find("geometry.D"), "must not be empty");
  const bool uses_detectors = cfg.scenario == Scenario::kFig4Transit || cfg.scenario == Scenario::kCustom;
  if (uses_detectors) {
    const double exit = g.offset + *std::max_element(g.widths.begin(), g.widths.end());
    for (const double d : g.detectors) {
      if (!(d >= exit)) {
        reject("geometry.D", in.find("geometry.D"),
               fmt::format("detector D={} lies before the barrier exit offset + L = {}", d, exit));
      }
    }
  }

  // Numerics.
  const auto& nu = cfg.numerics;
  if (nu.nodes < 16) reject("numerics.nodes", in.find("numerics.nodes"), "needs at least 16 nodes");
  if (!(nu.tolerance > 0.0)) reject("numerics.tolerance", in.find("numerics.tolerance"), "must be positive");
  if (!(nu.t_max > nu.t_min)) {
    reject("numerics.t_max", in.find("numerics.t_max"), fmt::format("t_max={} must exceed t_min={}", nu.t_max, nu.t_min));
  }
  if (!(nu.t_step > 0.0)) reject("numerics.t_step", in.find("numerics.t_step"), "must be positive");
  if (!(nu.time_tol > 0.0)) reject("numerics.time_tol", in.find("numerics.time_tol"), "must be positive");
  if (!(nu.min_prominence >= 0.0 && nu.min_prominence < 1.0)) {
    reject("numerics.min_prominence", in.find("numerics.min_prominence"), "must lie in [0, 1)");
  }
  if (!(nu.min_relative_density >= 0.0)) {
    reject("numerics.min_relative_density", in.find("numerics.min_relative_density"), "must be >= 0");
  }
  if (nu.samples < 2) reject("numerics.samples", in.find("numerics.samples"), "needs at least 2 samples");
  return cfg;
}

}  // namespace dirac_tunnel
