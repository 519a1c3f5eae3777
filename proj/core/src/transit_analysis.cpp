#include "dirac_tunnel/transit_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include <fmt/format.h>

#include "dirac_tunnel/errors.hpp"
#include "dirac_tunnel/parallel.hpp"

namespace dirac_tunnel {

std::string_view to_string(PeakKind kind) {
  switch (kind) {
    case PeakKind::CentralMax: return "central_max";
    case PeakKind::SecondaryMax: return "secondary_max";
    case PeakKind::Minimum: return "minimum";
  }
  return "unknown";
}

namespace {

struct Extremum {
  double time;
  double density;
  bool is_max;
};

// Iterated three-point parabolic fit. The stencil shrinks with the step but
// never below tol, where density differences are still well above the
// quadrature noise.
Extremum refine(const std::function<double(double)>& f, double t, double h, double tol, bool is_max) {
  double ft = f(t);
  for (int iter = 0; iter < 200; ++iter) {
    const double fm = f(t - h);
    const double fp = f(t + h);
    const double curvature = fm - 2.0 * ft + fp;
    const bool bracketed = is_max ? curvature < 0.0 : curvature > 0.0;
    double delta = 0.0;
    if (bracketed) {
      delta = 0.5 * h * (fm - fp) / curvature;
      delta = std::clamp(delta, -h, h);
    } else {
      // Not locally parabolic yet; walk toward the better neighbour.
      const bool left_better = is_max ? fm > fp : fm < fp;
      delta = left_better ? -h : h;
    }
    const double moved = t + delta;
    const double fmoved = f(moved);
    const bool improved = is_max ? fmoved >= ft : fmoved <= ft;
    if (improved) {
      t = moved;
      ft = fmoved;
    }
    if (std::abs(delta) < 0.1 * tol && h <= tol) break;
    h = std::max(tol, std::min(h, std::abs(delta)) * 0.5);
  }
  return {t, ft, is_max};
}

}  // namespace

std::vector<PeakRecord> scan_peaks(double z, const PacketEvaluator& packet, const ScanOptions& options) {
  if (!(options.step > 0.0) || !(options.t_max > options.t_min) || !(options.time_tol > 0.0)) {
    throw DomainError(fmt::format("invalid scan window [{}, {}] with step {}", options.t_min, options.t_max,
                                  options.step));
  }
  const auto count = static_cast<std::size_t>(std::floor((options.t_max - options.t_min) / options.step)) + 1;
  std::vector<double> times(count);
  for (std::size_t i = 0; i < count; ++i) times[i] = options.t_min + options.step * static_cast<double>(i);
  const DensityGrid grid = packet.density_over_time(z, times);

  std::vector<std::size_t> candidates;
  std::vector<bool> candidate_is_max;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double v = grid.values[i];
    if (v > grid.values[i - 1] && v > grid.values[i + 1]) {
      candidates.push_back(i);
      candidate_is_max.push_back(true);
    } else if (v < grid.values[i - 1] && v < grid.values[i + 1]) {
      candidates.push_back(i);
      candidate_is_max.push_back(false);
    }
  }

  const auto f = [&](double t) { return packet.density(z, t); };
  std::vector<Extremum> extrema(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t j) {
    extrema[j] = refine(f, times[candidates[j]], options.step, options.time_tol, candidate_is_max[j]);
  });

  std::optional<std::size_t> central;
  for (std::size_t j = 0; j < extrema.size(); ++j) {
    if (extrema[j].is_max && (!central || extrema[j].density > extrema[*central].density)) central = j;
  }
  if (!central) {
    throw EmptyResultError(fmt::format("no density maximum at z={} for t in [{}, {}]", z, options.t_min, options.t_max));
  }
  const double peak_density = extrema[*central].density;

  // Maxima survive if strong enough and prominent over their neighbouring minima.
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < extrema.size(); ++j) {
    if (!extrema[j].is_max) continue;
    if (j == *central) {
      kept.push_back(j);
      continue;
    }
    if (extrema[j].density < options.min_relative_density * peak_density) continue;
    double higher_min = 0.0;
    bool has_neighbour = false;
    if (j > 0 && !extrema[j - 1].is_max) {
      higher_min = extrema[j - 1].density;
      has_neighbour = true;
    }
    if (j + 1 < extrema.size() && !extrema[j + 1].is_max) {
      higher_min = std::max(higher_min, extrema[j + 1].density);
      has_neighbour = true;
    }
    const double prominence = has_neighbour ? (extrema[j].density - higher_min) / extrema[j].density : 1.0;
    if (prominence >= options.min_prominence) kept.push_back(j);
  }

  std::vector<PeakRecord> out;
  for (std::size_t n = 0; n < kept.size(); ++n) {
    const Extremum& e = extrema[kept[n]];
    out.push_back({e.time, e.density, kept[n] == *central ? PeakKind::CentralMax : PeakKind::SecondaryMax});
    if (n + 1 == kept.size()) break;
    std::optional<std::size_t> deepest;
    for (std::size_t j = kept[n] + 1; j < kept[n + 1]; ++j) {
      if (!extrema[j].is_max && (!deepest || extrema[j].density < extrema[*deepest].density)) deepest = j;
    }
    if (deepest) out.push_back({extrema[*deepest].time, extrema[*deepest].density, PeakKind::Minimum});
  }
  return out;
}

std::vector<PeakRecord> scan_peaks(double z, const PacketSpec& spec, const BarrierConfig& cfg,
                                   const ScanOptions& options) {
  const PacketEvaluator packet =
      PacketEvaluator::transmitted(spec, cfg, options.quadrature, options.normalization);
  return scan_peaks(z, packet, options);
}

const PeakRecord& central_peak(const std::vector<PeakRecord>& peaks) {
  const auto it =
      std::find_if(peaks.begin(), peaks.end(), [](const PeakRecord& r) { return r.kind == PeakKind::CentralMax; });
  if (it == peaks.end()) throw EmptyResultError("peak list has no central maximum");
  return *it;
}

TunnelingTime numeric_tunneling_time(const PacketSpec& spec, const BarrierConfig& cfg, const ScanOptions& options) {
  validate(cfg);
  if (!(cfg.width > 0.0)) throw DomainError("tunneling time needs a barrier of positive width");
  const double tau = central_peak(scan_peaks(cfg.offset + cfg.width, spec, cfg, options)).time;
  return {tau, cfg.width / tau};
}

double transit_time_predicted(double detector, double width, double v_tun, double v_out) {
  if (!(detector >= width) || !(width >= 0.0)) {
    throw DomainError(fmt::format("detector D={} must lie at or beyond the barrier width L={}", detector, width));
  }
  if (!(v_tun > 0.0) || !(v_out > 0.0) || !(v_out < 1.0)) {
    throw DomainError(fmt::format("transit prediction needs v_tun > 0 and 0 < v_out < 1, got {} and {}", v_tun, v_out));
  }
  return width / v_tun + (detector - width) / v_out;
}

TransitReport transit_measure(double detector, const PacketSpec& spec, const BarrierConfig& cfg,
                              const ScanOptions& options) {
  validate(cfg);
  if (!(detector >= cfg.offset + cfg.width)) {
    throw DomainError(fmt::format("detector D={} lies before the barrier exit {}", detector, cfg.offset + cfg.width));
  }
  ScanOptions widened = options;
  widened.t_max = std::max(options.t_max, 2.0 * detector / group_velocity(spec.p0, cfg.mass));
  const double t = central_peak(scan_peaks(detector, spec, cfg, widened)).time;
  TransitReport report;
  report.detector = detector;
  report.barrier_width = cfg.width;
  report.t_dl = t;
  report.v_dl = detector / t;
  report.superluminal = report.v_dl > 1.0;
  return report;
}

double measure_outgoing_velocity(double detector, double spacing, const PacketSpec& spec, const BarrierConfig& cfg,
                                 const ScanOptions& options) {
  if (!(spacing > 0.0)) throw DomainError("detector spacing must be positive");
  const TransitReport near = transit_measure(detector, spec, cfg, options);
  const TransitReport far = transit_measure(detector + spacing, spec, cfg, options);
  return spacing / (far.t_dl - near.t_dl);
}

double superluminal_detector_bound(double v_tun, double v_out, double width) {
  if (!(v_tun > 1.0 && v_out > 0.0 && v_out < 1.0)) return 0.0;
  return width * (v_tun - v_out) / (v_tun * (1.0 - v_out));
}

double composed_velocity(double detector, double width, double v_tun, double v_out) {
  return detector / transit_time_predicted(detector, width, v_tun, v_out);
}

}  // namespace dirac_tunnel
