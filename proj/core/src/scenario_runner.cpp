#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>

#include <fmt/format.h>
#include <json.hpp>

#include "dirac_tunnel/errors.hpp"
#include "dirac_tunnel/opaque_asymptotics.hpp"
#include "dirac_tunnel/parallel.hpp"
#include "dirac_tunnel/scenario.hpp"

namespace dirac_tunnel {
namespace {

std::string short_real(double v) { return fmt::format("{}", v); }

std::string joined(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ";" : "") + short_real(values[i]);
  return out;
}

std::string_view to_string(Normalization n) { return n == Normalization::kRaw ? "raw" : "momentum_norm2"; }

// Header comment shared by every table of a run.
std::vector<std::pair<std::string, std::string>> base_meta(const ScenarioConfig& cfg, const std::string& widths) {
  return {
      {"V0", format_real(cfg.physics.v0)},         {"m", format_real(cfg.physics.mass)},
      {"L", widths},                               {"p0", format_real(cfg.physics.p0)},
      {"d", format_real(cfg.physics.d)},           {"nodes", std::to_string(cfg.numerics.nodes)},
      {"offset", format_real(cfg.geometry.offset)}, {"normalization", std::string(to_string(cfg.numerics.normalization))},
  };
}

struct Failures {
  std::mutex mutex;
  std::vector<std::pair<std::size_t, ManifestFailure>> items;  // ordered by cell index afterwards

  // Runs fn, turning numerical failures into records.
  bool guard(std::size_t index, const std::string& cell, const std::function<void()>& fn) {
    auto record = [&](std::string kind, const char* what) {
      const std::lock_guard lock(mutex);
      items.push_back({index, {cell, std::move(kind), what}});
    };
    try {
      fn();
      return true;
    } catch (const AccuracyError& e) {
      record("accuracy", e.what());
    } catch (const EmptyResultError& e) {
      record("empty_result", e.what());
    } catch (const NumericalDegeneracyError& e) {
      record("degenerate", e.what());
    } catch (const DomainError& e) {
      record("domain", e.what());
    }
    return false;
  }

  std::vector<ManifestFailure> sorted() {
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<ManifestFailure> out;
    for (auto& [i, f] : items) out.push_back(std::move(f));
    return out;
  }
};

template <typename T>
std::vector<std::optional<T>> run_cells(std::size_t n, Failures& failures,
                                        const std::function<std::string(std::size_t)>& name,
                                        const std::function<T(std::size_t)>& body) {
  std::vector<std::optional<T>> out(n);
  parallel_for(n, [&](std::size_t i) { failures.guard(i, name(i), [&] { out[i] = body(i); }); });
  return out;
}

Table peaks_table(const ScenarioConfig& cfg, const std::vector<std::optional<std::vector<PeakRecord>>>& peaks,
                  bool nearest_only) {
  Table t;
  t.meta = base_meta(cfg, joined(cfg.geometry.widths));
  t.columns = {"L", "kind", "t_peak", "density"};
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (!peaks[i]) continue;
    const auto& list = *peaks[i];
    std::vector<PeakRecord> rows = list;
    if (nearest_only) {
      // Central peak plus the nearest secondary maximum on each side.
      rows.clear();
      const auto central = std::find_if(list.begin(), list.end(),
                                        [](const PeakRecord& r) { return r.kind == PeakKind::CentralMax; });
      for (auto it = std::make_reverse_iterator(central); it != list.rend(); ++it) {
        if (it->kind == PeakKind::SecondaryMax) {
          rows.push_back(*it);
          break;
        }
      }
      rows.push_back(*central);
      for (auto it = std::next(central); it != list.end(); ++it) {
        if (it->kind == PeakKind::SecondaryMax) {
          rows.push_back(*it);
          break;
        }
      }
    }
    for (const PeakRecord& r : rows) {
      t.rows.push_back({cfg.geometry.widths[i], std::string(to_string(r.kind)), r.time, r.density});
    }
  }
  return t;
}

void fig1(const ScenarioConfig& cfg, ScenarioTables& out, Failures& failures) {
  const PacketSpec spec = cfg.packet();
  const auto& widths = cfg.geometry.widths;
  const std::size_t n = cfg.numerics.samples;
  std::vector<double> momenta(n);
  for (std::size_t i = 0; i < n; ++i) {
    momenta[i] = spec.window.lo + spec.window.width() * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  Table stats;
  stats.meta = base_meta(cfg, joined(widths));
  stats.columns = {"L", "p_L", "E_L", "v_L", "component_ratio", "transmitted_weight"};
  const auto results = run_cells<FilterStats>(
      widths.size(), failures, [&](std::size_t i) { return fmt::format("fig1_filter L={}", short_real(widths[i])); },
      [&](std::size_t i) { return filter_stats(spec, cfg.barrier(widths[i])); });
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const BarrierConfig barrier = cfg.barrier(widths[i]);
    const FilteredDistributions dist = filtered_distributions(momenta, spec, barrier);
    Table curve;
    curve.meta = base_meta(cfg, short_real(widths[i]));
    curve.columns = {"p", "g_T", "f_T"};
    for (std::size_t k = 0; k < n; ++k) curve.rows.push_back({momenta[k], dist.g_t[k], dist.f_t[k]});
    out.tables[fmt::format("fig1_distributions_L{}", short_real(widths[i]))] = std::move(curve);
    if (const auto& s = results[i]) {
      stats.rows.push_back({widths[i], s->p_mean, s->e_mean, s->v_out, spinor_component_ratio(s->p_mean, cfg.physics.mass),
                            s->transmitted_weight});
    }
  }
  out.tables["fig1_filter_stats"] = std::move(stats);
}

std::vector<std::optional<std::vector<PeakRecord>>> exit_scans(const ScenarioConfig& cfg, const std::string& label,
                                                               Failures& failures) {
  const PacketSpec spec = cfg.packet();
  const ScanOptions scan = cfg.scan_options();
  const auto& widths = cfg.geometry.widths;
  return run_cells<std::vector<PeakRecord>>(
      widths.size(), failures, [&](std::size_t i) { return fmt::format("{} L={}", label, short_real(widths[i])); },
      [&](std::size_t i) {
        const BarrierConfig barrier = cfg.barrier(widths[i]);
        return scan_peaks(barrier.offset + barrier.width, spec, barrier, scan);
      });
}

Table times_table(const ScenarioConfig& cfg, Failures& failures, const std::string& label) {
  const PacketSpec spec = cfg.packet();
  const ScanOptions scan = cfg.scan_options();
  const auto& widths = cfg.geometry.widths;
  const double v_opaque = opaque_tunneling_velocity(cfg.barrier(0.0));
  const auto results = run_cells<TunnelingTime>(
      widths.size(), failures, [&](std::size_t i) { return fmt::format("{} L={}", label, short_real(widths[i])); },
      [&](std::size_t i) { return numeric_tunneling_time(spec, cfg.barrier(widths[i]), scan); });
  Table t;
  t.meta = base_meta(cfg, joined(widths));
  t.columns = {"L", "tau", "v_tun", "tau_opaque", "v_opaque"};
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (!results[i]) continue;
    const double tau_opaque = widths[i] / v_opaque;
    t.rows.push_back({widths[i], results[i]->tau, results[i]->v, tau_opaque, v_opaque});
  }
  return t;
}

void transit(const ScenarioConfig& cfg, ScenarioTables& out, Failures& failures, const std::string& prefix,
             bool with_density) {
  const PacketSpec spec = cfg.packet();
  const ScanOptions scan = cfg.scan_options();
  const auto& widths = cfg.geometry.widths;
  const auto& detectors = cfg.geometry.detectors;
  const std::size_t cells = widths.size() * detectors.size();
  const auto reports = run_cells<TransitReport>(
      cells, failures,
      [&](std::size_t c) {
        return fmt::format("transit D={} L={}", short_real(detectors[c % detectors.size()]),
                           short_real(widths[c / detectors.size()]));
      },
      [&](std::size_t c) {
        return transit_measure(detectors[c % detectors.size()], spec, cfg.barrier(widths[c / detectors.size()]), scan);
      });
  Table t;
  t.meta = base_meta(cfg, joined(widths));
  t.columns = {"D", "L", "t_dl", "v_dl", "superluminal"};
  for (const auto& r : reports) {
    if (r) t.rows.push_back({r->detector, r->barrier_width, r->t_dl, r->v_dl, r->superluminal});
  }
  out.tables[prefix + "transit"] = std::move(t);

  if (!with_density) return;
  for (std::size_t c = 0; c < cells; ++c) {
    const double detector = detectors[c % detectors.size()];
    const double width = widths[c / detectors.size()];
    const PacketEvaluator packet =
        PacketEvaluator::transmitted(spec, cfg.barrier(width), scan.quadrature, scan.normalization);
    const double t_end = std::max(scan.t_max, 2.0 * detector / group_velocity(spec.p0, cfg.physics.mass));
    std::vector<double> times;
    for (double tt = 0.0; tt <= t_end + 1e-9; tt = times.size() * scan.step) times.push_back(tt);
    std::optional<DensityGrid> grid;
    failures.guard(cells + c, fmt::format("density D={} L={}", short_real(detector), short_real(width)),
                   [&] { grid = packet.density_over_time(detector, times); });
    if (!grid) continue;
    Table d;
    d.meta = base_meta(cfg, short_real(width));
    d.meta.emplace_back("D", format_real(detector));
    d.columns = {"t", "density"};
    for (std::size_t k = 0; k < grid->axis.size(); ++k) d.rows.push_back({grid->axis[k], grid->values[k]});
    out.tables[fmt::format("{}density_D{}_L{}", prefix, short_real(detector), short_real(width))] = std::move(d);
  }
}

std::string gnuplot_script(const ScenarioConfig& cfg, const ScenarioTables& tables) {
  std::string s = fmt::format("# gnuplot script for scenario {}\nset datafile separator ','\nset key autotitle columnhead\n",
                              to_string(cfg.scenario));
  for (const auto& [name, table] : tables.tables) {
    if (table.columns.size() < 2) continue;
    const bool log_y = table.columns.back() == "density";
    std::string_view using_cols = "1:2";
    std::string_view style = "lines";
    if (table.columns[1] == "kind") {
      using_cols = "3:4";  // peak time against density
      style = "points";
    } else if (table.columns[0] == "D") {
      using_cols = "2:3";  // arrival time against barrier width
      style = "linespoints";
    }
    s += fmt::format("\nset title '{}'\n{}plot '{}.csv' using {} with {}\n", name,
                     log_y ? "set logscale y\n" : "unset logscale y\n", name, using_cols, style);
  }
  return s;
}

}  // namespace

ScenarioTables compute_scenario(const ScenarioConfig& cfg) {
  ScenarioTables out;
  Failures failures;
  switch (cfg.scenario) {
    case Scenario::kFig1Filter:
      fig1(cfg, out, failures);
      break;
    case Scenario::kFig2Peaks:
      out.tables["fig2_peaks"] = peaks_table(cfg, exit_scans(cfg, "fig2_peaks", failures), false);
      break;
    case Scenario::kTable1:
      out.tables["table1"] = peaks_table(cfg, exit_scans(cfg, "table1", failures), true);
      break;
    case Scenario::kFig3Times:
      out.tables["fig3_tunneling_times"] = times_table(cfg, failures, "fig3_times");
      break;
    case Scenario::kFig4Transit:
      transit(cfg, out, failures, "fig4_", true);
      break;
    case Scenario::kCustom: {
      ScenarioConfig positive = cfg;
      std::erase_if(positive.geometry.widths, [](double l) { return !(l > 0.0); });
      if (!positive.geometry.widths.empty()) {
        out.tables["tunneling_times"] = times_table(positive, failures, "custom");
      }
      transit(cfg, out, failures, "", false);
      break;
    }
  }
  out.failures = failures.sorted();
  return out;
}

Manifest run_scenario(const ScenarioConfig& cfg) {
  const ScenarioTables tables = compute_scenario(cfg);
  const std::filesystem::path dir{cfg.output.directory};
  std::filesystem::create_directories(dir);

  Manifest manifest;
  manifest.scenario = std::string(to_string(cfg.scenario));
  manifest.failures = tables.failures;
  const bool json = cfg.output.format == OutputFormat::kJson;

  auto emit = [&](const std::string& name, const std::string& bytes) {
    std::ofstream os(dir / name, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(fmt::format("cannot write {}", (dir / name).string()));
    os << bytes;
    manifest.files.push_back({name, sha256_hex(bytes), bytes.size()});
  };
  for (const auto& [name, table] : tables.tables) {
    emit(name + (json ? ".json" : ".csv"), json ? to_json(table) : to_csv(table));
  }
  if (!json) emit("plot.gp", gnuplot_script(cfg, tables));

  nlohmann::ordered_json doc;
  doc["scenario"] = manifest.scenario;
  doc["physics"] = {{"v0", cfg.physics.v0}, {"mass", cfg.physics.mass}, {"p0", cfg.physics.p0}, {"d", cfg.physics.d}};
  doc["geometry"] = {{"L", cfg.geometry.widths}, {"D", cfg.geometry.detectors}, {"offset", cfg.geometry.offset}};
  doc["numerics"] = {
      {"nodes", cfg.numerics.nodes},
      {"tolerance", cfg.numerics.tolerance},
      {"t_min", cfg.numerics.t_min},
      {"t_max", cfg.numerics.t_max},
      {"t_step", cfg.numerics.t_step},
      {"time_tol", cfg.numerics.time_tol},
      {"min_prominence", cfg.numerics.min_prominence},
      {"min_relative_density", cfg.numerics.min_relative_density},
      {"samples", cfg.numerics.samples},
      {"normalization", to_string(cfg.numerics.normalization)},
  };
  doc["output"] = {{"directory", cfg.output.directory}, {"format", json ? "json" : "csv"}};
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : manifest.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  doc["files"] = std::move(files);
  nlohmann::ordered_json failed = nlohmann::ordered_json::array();
  for (const auto& f : manifest.failures) failed.push_back({{"cell", f.cell}, {"kind", f.kind}, {"message", f.message}});
  doc["failures"] = std::move(failed);
  doc["status"] = manifest.ok() ? "ok" : "partial";

  manifest.json = doc.dump(2) + "\n";
  std::ofstream os(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!os) throw Error(fmt::format("cannot write {}", (dir / "manifest.json").string()));
  os << manifest.json;
  return manifest;
}

}  // namespace dirac_tunnel
