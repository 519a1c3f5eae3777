#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dirac_tunnel/barrier_scattering.hpp"
#include "dirac_tunnel/kinematics.hpp"

namespace dirac_tunnel {

/// Truncated Gaussian momentum distribution
///   g(p) = exp[-(p - p0)^2 d^2 / 4]  on the window, 0 outside.
struct PacketSpec {
  double p0 = 0.0;
  double width = 10.0;  // spatial localisation d
  MomentumWindow window;
};

/// Builds a spec on the Dirac window of `cfg`. Throws DomainError unless
/// d > 0 and p0 lies in the window; propagates UnsupportedRegimeError.
PacketSpec make_packet_spec(double p0, double width, const BarrierConfig& cfg);

double momentum_weight(double p, const PacketSpec& spec) noexcept;

/// Lower-to-upper spinor component ratio p / (E + m).
double spinor_component_ratio(double p, double mass) noexcept;

/// Scale applied to packet densities.
enum class Normalization {
  /// g as written, with unit maximum.
  kRaw,
  /// g rescaled so the incident momentum-space weight int (g^2 + f^2) dp
  /// equals 2.
  kMomentumNorm2,
};

struct QuadratureOptions {
  std::size_t order = 16;           // Gauss-Legendre points per panel
  std::size_t min_nodes = 2048;     // coarsest composite rule tried
  std::size_t max_nodes = 1 << 19;  // give up (AccuracyError) beyond this
  double radians_per_panel = 6.0;   // phase budget used to pick the first level
  double rel_tol = 1e-10;           // on the spinor amplitude
  double abs_floor = 1e-14;         // relative to the integrand's L1 norm
};

struct PacketEvaluation {
  Spinor amplitude;
  double error_estimate = 0.0;  // |amplitude(n) - amplitude(n/2)|
  std::size_t nodes = 0;
};

/// Samples of a density along one axis (z at fixed t, or t at fixed z).
struct DensityGrid {
  std::vector<double> axis;
  std::vector<double> values;
};

/// Quadrature engine for incident and transmitted packets. Node tables are
/// built lazily, once per refinement level, and shared read-only between
/// copies; concurrent evaluate() calls on one evaluator are safe.
class PacketEvaluator {
 public:
  /// Free packet: integral of g(p) u(p,E) e^{i(pz - Et)} over the window.
  static PacketEvaluator incident(const PacketSpec& spec, double mass, const QuadratureOptions& options = {},
                                  Normalization norm = Normalization::kRaw);

  /// Transmitted packet: integral of g(p) T(p,L) u(p,E) e^{i(pz - Et)}, valid
  /// in region III (z >= offset + L).
  static PacketEvaluator transmitted(const PacketSpec& spec, const BarrierConfig& cfg,
                                     const QuadratureOptions& options = {},
                                     Normalization norm = Normalization::kRaw);

  /// Refines until two successive node doublings agree; throws AccuracyError
  /// when max_nodes is reached first, or DomainError for z inside/before the
  /// barrier of a transmitted packet.
  PacketEvaluation evaluate(double z, double t) const;

  /// Single fixed-size evaluation with no refinement. `nodes` must be one of
  /// the level sizes (min_nodes * 2^k, rounded to whole panels).
  Spinor evaluate_fixed(double z, double t, std::size_t nodes) const;

  Spinor amplitude(double z, double t) const { return evaluate(z, t).amplitude; }
  double density(double z, double t) const;

  DensityGrid density_over_time(double z, std::span<const double> times) const;
  DensityGrid density_over_space(std::span<const double> positions, double t) const;

  /// Multiplier applied to densities by the chosen normalisation.
  double density_scale() const noexcept { return density_scale_; }
  bool is_transmitted() const noexcept { return barrier_.has_value(); }
  const PacketSpec& spec() const noexcept { return spec_; }
  const QuadratureOptions& options() const noexcept { return options_; }
  std::size_t level_nodes(std::size_t level) const noexcept;

 private:
  struct Level;
  struct Cache;

  PacketEvaluator(const PacketSpec& spec, double mass, std::optional<BarrierConfig> barrier,
                  const QuadratureOptions& options, Normalization norm);

  const Level& level(std::size_t index) const;
  std::size_t first_level(double z, double t) const;
  Spinor sum_level(const Level& lvl, double z, double t) const;

  PacketSpec spec_;
  double mass_;
  std::optional<BarrierConfig> barrier_;
  QuadratureOptions options_;
  std::size_t base_panels_;
  std::size_t level_count_;
  double amplitude_scale_ = 1.0;
  double density_scale_ = 1.0;
  std::shared_ptr<Cache> cache_;
};

double density(const Spinor& s) noexcept;

/// One-shot conveniences; build an evaluator per call.
Spinor incident_packet(double z, double t, const PacketSpec& spec, double mass = 1.0);
Spinor transmitted_packet(double z, double t, const PacketSpec& spec, const BarrierConfig& cfg);

/// Momentum statistics of the transmitted distribution weighted by
/// g_T^2 + f_T^2.
struct FilterStats {
  double p_mean = 0.0;              // p_L
  double e_mean = 0.0;              // E(p_L)
  double v_out = 0.0;               // p_L / E_L
  double transmitted_weight = 0.0;  // int (g_T^2 + f_T^2) dp
};

/// Throws NumericalDegeneracyError when the transmitted weight vanishes.
FilterStats filter_stats(const PacketSpec& spec, const BarrierConfig& cfg);

struct FilteredDistributions {
  std::vector<double> g_t;
  std::vector<double> f_t;
};

/// Pointwise g_T = g |T| and f_T = p/(E+m) g_T. Samples must lie in the window.
FilteredDistributions filtered_distributions(std::span<const double> momenta, const PacketSpec& spec,
                                             const BarrierConfig& cfg);

}  // namespace dirac_tunnel
