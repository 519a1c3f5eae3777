#pragma once

#include <string_view>
#include <vector>

#include "dirac_tunnel/kinematics.hpp"
#include "dirac_tunnel/wavepacket.hpp"

namespace dirac_tunnel {

enum class PeakKind { CentralMax, SecondaryMax, Minimum };

std::string_view to_string(PeakKind kind);

struct PeakRecord {
  double time = 0.0;
  double density = 0.0;
  PeakKind kind = PeakKind::Minimum;
};

struct ScanOptions {
  double t_min = -100.0;
  double t_max = 100.0;
  double step = 0.25;       // coarse grid spacing
  double time_tol = 1e-3;   // parabolic refinement stops below this
  // Maxima weaker than this fraction of the central peak are dropped. Thin
  // barrier secondaries sit about twelve orders of magnitude below the
  // central peak, so the default only removes quadrature noise.
  double min_relative_density = 1e-15;
  // A maximum must stand this fraction above the higher of its neighbouring
  // minima; flatter bumps are shoulders on a tail, not peaks.
  double min_prominence = 0.1;
  Normalization normalization = Normalization::kRaw;
  QuadratureOptions quadrature;
};

/// Local extrema of t -> |Psi(z, t)|^2 on [t_min, t_max], in time order.
/// Exactly one record is CentralMax (the global maximum); minima are the
/// deepest points between consecutive reported maxima. Throws
/// EmptyResultError when the density has no interior maximum.
std::vector<PeakRecord> scan_peaks(double z, const PacketEvaluator& packet, const ScanOptions& options = {});

/// Scan of the transmitted packet of `cfg` at position z.
std::vector<PeakRecord> scan_peaks(double z, const PacketSpec& spec, const BarrierConfig& cfg,
                                   const ScanOptions& options = {});

const PeakRecord& central_peak(const std::vector<PeakRecord>& peaks);

struct TunnelingTime {
  double tau = 0.0;  // central-peak time at the barrier exit
  double v = 0.0;    // L / tau
};

/// Central peak of the transmitted density at z = offset + L, on the clock
/// where the incident peak sits at z = 0 at t = 0. Needs L > 0.
TunnelingTime numeric_tunneling_time(const PacketSpec& spec, const BarrierConfig& cfg,
                                     const ScanOptions& options = {});

/// Predicted arrival time L / v_tun + (D - L) / v_out.
double transit_time_predicted(double detector, double width, double v_tun, double v_out);

struct TransitReport {
  double detector = 0.0;
  double barrier_width = 0.0;
  double t_dl = 0.0;
  double v_dl = 0.0;  // detector / t_dl
  bool superluminal = false;
};

/// Arrival of the central transmitted peak at z = D. The scan window is
/// widened to at least 2 D / v0 so slow free packets are still caught.
TransitReport transit_measure(double detector, const PacketSpec& spec, const BarrierConfig& cfg,
                              const ScanOptions& options = {});

/// Speed of the transmitted peak between detectors at D and D + spacing.
double measure_outgoing_velocity(double detector, double spacing, const PacketSpec& spec, const BarrierConfig& cfg,
                                 const ScanOptions& options = {});

/// Largest detector distance for which the two-leg average velocity
///   D v_tun v_out / (L v_out + (D - L) v_tun)
/// still exceeds 1: L (v_tun - v_out) / (v_tun (1 - v_out)). Returns 0 unless
/// v_tun > 1 > v_out > 0.
double superluminal_detector_bound(double v_tun, double v_out, double width);

/// D / transit_time_predicted(D, L, v_tun, v_out).
double composed_velocity(double detector, double width, double v_tun, double v_out);

}  // namespace dirac_tunnel
