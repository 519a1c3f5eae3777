#include "dirac_tunnel/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include <fmt/format.h>

#include "dirac_tunnel/errors.hpp"
#include "dirac_tunnel/parallel.hpp"
#include "dirac_tunnel/quadrature.hpp"

namespace dirac_tunnel {

PacketSpec make_packet_spec(double p0, double width, const BarrierConfig& cfg) {
  const MomentumWindow window = momentum_window(cfg);
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw DomainError(fmt::format("packet localisation d must be positive, got {}", width));
  }
  if (!window.contains(p0)) {
    throw DomainError(fmt::format("packet centre p0={} outside the Dirac window [{}, {}]", p0, window.lo, window.hi));
  }
  return {p0, width, window};
}

double momentum_weight(double p, const PacketSpec& spec) noexcept {
  if (!spec.window.contains(p)) return 0.0;
  const double u = (p - spec.p0) * spec.width;
  return std::exp(-0.25 * u * u);
}

double spinor_component_ratio(double p, double mass) noexcept { return p / (total_energy(p, mass) + mass); }

double density(const Spinor& s) noexcept {
  double acc = 0.0;
  for (const complex& c : s) acc += std::norm(c);
  return acc;
}

struct PacketEvaluator::Level {
  std::vector<double> p;
  std::vector<double> energy;
  std::vector<double> ratio;
  std::vector<complex> weight;
  double l1 = 0.0;
};

struct PacketEvaluator::Cache {
  explicit Cache(std::size_t n) : flags(std::make_unique<std::once_flag[]>(n)), levels(n) {}
  std::unique_ptr<std::once_flag[]> flags;
  std::vector<Level> levels;
};

PacketEvaluator::PacketEvaluator(const PacketSpec& spec, double mass, std::optional<BarrierConfig> barrier,
                                 const QuadratureOptions& options, Normalization norm)
    : spec_(spec), mass_(mass), barrier_(std::move(barrier)), options_(options) {
  if (options_.order == 0 || options_.min_nodes < options_.order || options_.max_nodes < options_.min_nodes) {
    throw DomainError("quadrature options need 0 < order <= min_nodes <= max_nodes");
  }
  if (!(spec_.width > 0.0)) throw DomainError("packet localisation d must be positive");
  base_panels_ = (options_.min_nodes + options_.order - 1) / options_.order;
  level_count_ = 1;
  while (base_panels_ * (std::size_t{1} << level_count_) * options_.order <= options_.max_nodes) ++level_count_;
  if (level_count_ < 2) throw DomainError("quadrature options leave no room for a refinement step");
  cache_ = std::make_shared<Cache>(level_count_);

  if (norm == Normalization::kMomentumNorm2) {
    const CompositeRule rule = composite_gauss_legendre(spec_.window.lo, spec_.window.hi, base_panels_, options_.order);
    const double weight = integrate(rule, [&](double p) {
      const double g = momentum_weight(p, spec_);
      const double k = spinor_component_ratio(p, mass_);
      return g * g * (1.0 + k * k);
    });
    if (!(weight > 0.0)) throw NumericalDegeneracyError("incident momentum weight vanished");
    density_scale_ = 2.0 / weight;
    amplitude_scale_ = std::sqrt(density_scale_);
  }
}

PacketEvaluator PacketEvaluator::incident(const PacketSpec& spec, double mass, const QuadratureOptions& options,
                                          Normalization norm) {
  if (!(mass > 0.0)) throw DomainError("particle mass must be positive");
  return PacketEvaluator(spec, mass, std::nullopt, options, norm);
}

PacketEvaluator PacketEvaluator::transmitted(const PacketSpec& spec, const BarrierConfig& cfg,
                                             const QuadratureOptions& options, Normalization norm) {
  validate(cfg);
  return PacketEvaluator(spec, cfg.mass, cfg, options, norm);
}

std::size_t PacketEvaluator::level_nodes(std::size_t level) const noexcept {
  return base_panels_ * (std::size_t{1} << level) * options_.order;
}

const PacketEvaluator::Level& PacketEvaluator::level(std::size_t index) const {
  std::call_once(cache_->flags[index], [&] {
    const CompositeRule rule = composite_gauss_legendre(spec_.window.lo, spec_.window.hi,
                                                        base_panels_ << index, options_.order);
    Level lvl;
    lvl.p = rule.nodes;
    lvl.energy.resize(rule.size());
    lvl.ratio.resize(rule.size());
    lvl.weight.resize(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double p = rule.nodes[i];
      lvl.energy[i] = total_energy(p, mass_);
      lvl.ratio[i] = spinor_component_ratio(p, mass_);
      complex w{rule.weights[i] * momentum_weight(p, spec_) * amplitude_scale_, 0.0};
      if (barrier_) {
        // e^{-ipL} is folded into the phase reference instead.
        const TransmissionPolar tp = transmission_polar(p, *barrier_);
        w *= std::polar(tp.magnitude(), tp.theta);
      }
      lvl.weight[i] = w;
      lvl.l1 += std::abs(w) * (1.0 + lvl.ratio[i]);
    }
    cache_->levels[index] = std::move(lvl);
  });
  return cache_->levels[index];
}

std::size_t PacketEvaluator::first_level(double z, double t) const {
  const double z_ref = barrier_ ? barrier_->width : 0.0;
  const double e_span = total_energy(spec_.window.hi, mass_) - total_energy(spec_.window.lo, mass_);
  const double phase_span = spec_.window.width() * std::abs(z - z_ref) + e_span * std::abs(t) + std::numbers::pi;
  const double panels_needed = std::ceil(phase_span / options_.radians_per_panel);
  std::size_t k = 0;
  while (k + 2 < level_count_ && static_cast<double>(base_panels_ << k) < panels_needed) ++k;
  return k;
}

Spinor PacketEvaluator::sum_level(const Level& lvl, double z, double t) const {
  const double shift = z - (barrier_ ? barrier_->width : 0.0);
  complex up{};
  complex down{};
  for (std::size_t i = 0; i < lvl.p.size(); ++i) {
    const complex c = lvl.weight[i] * std::polar(1.0, lvl.p[i] * shift - lvl.energy[i] * t);
    up += c;
    down += c * lvl.ratio[i];
  }
  return {up, complex{}, down, complex{}};
}

namespace {

double spinor_distance(const Spinor& a, const Spinor& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc);
}

}  // namespace

PacketEvaluation PacketEvaluator::evaluate(double z, double t) const {
  if (barrier_ && z < barrier_->offset + barrier_->width) {
    throw DomainError(fmt::format("transmitted packet requested at z={} before the barrier exit {}", z,
                                  barrier_->offset + barrier_->width));
  }
  std::size_t k = first_level(z, t);
  Spinor coarse = sum_level(level(k), z, t);
  double err = 0.0;
  for (; k + 1 < level_count_; ++k) {
    const Level& fine_level = level(k + 1);
    const Spinor fine = sum_level(fine_level, z, t);
    err = spinor_distance(fine, coarse);
    const double scale = std::sqrt(dirac_tunnel::density(fine));
    if (err <= std::max(options_.rel_tol * scale, options_.abs_floor * fine_level.l1)) {
      return {fine, err, fine_level.p.size()};
    }
    coarse = fine;
  }
  throw AccuracyError(fmt::format("packet quadrature did not converge at z={}, t={} with {} nodes", z, t,
                                  level_nodes(level_count_ - 1)),
                      dirac_tunnel::density(coarse), err);
}

Spinor PacketEvaluator::evaluate_fixed(double z, double t, std::size_t nodes) const {
  for (std::size_t k = 0; k < level_count_; ++k) {
    if (level_nodes(k) == nodes) return sum_level(level(k), z, t);
  }
  throw DomainError(fmt::format("{} is not a refinement level of this evaluator", nodes));
}

double PacketEvaluator::density(double z, double t) const { return dirac_tunnel::density(amplitude(z, t)); }

DensityGrid PacketEvaluator::density_over_time(double z, std::span<const double> times) const {
  DensityGrid grid{{times.begin(), times.end()}, std::vector<double>(times.size())};
  parallel_for(times.size(), [&](std::size_t i) { grid.values[i] = density(z, times[i]); });
  return grid;
}

DensityGrid PacketEvaluator::density_over_space(std::span<const double> positions, double t) const {
  DensityGrid grid{{positions.begin(), positions.end()}, std::vector<double>(positions.size())};
  parallel_for(positions.size(), [&](std::size_t i) { grid.values[i] = density(positions[i], t); });
  return grid;
}

Spinor incident_packet(double z, double t, const PacketSpec& spec, double mass) {
  return PacketEvaluator::incident(spec, mass).amplitude(z, t);
}

Spinor transmitted_packet(double z, double t, const PacketSpec& spec, const BarrierConfig& cfg) {
  return PacketEvaluator::transmitted(spec, cfg).amplitude(z, t);
}

namespace {

struct FilterMoments {
  double weight = 0.0;  // scaled by e^{-log_shift}
  double first = 0.0;
  double log_shift = 0.0;
};

// Integrates (g_T^2 + f_T^2) and p (g_T^2 + f_T^2) in log space so opaque
// barriers do not underflow the weights.
FilterMoments filter_moments(const PacketSpec& spec, const BarrierConfig& cfg, std::size_t panels) {
  const CompositeRule rule = composite_gauss_legendre(spec.window.lo, spec.window.hi, panels, 16);
  std::vector<double> log_w(rule.size());
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double p = rule.nodes[i];
    const double u = (p - spec.p0) * spec.width;
    const double k = spinor_component_ratio(p, cfg.mass);
    log_w[i] = 2.0 * (-0.25 * u * u + transmission_polar(p, cfg).log_magnitude) + std::log1p(k * k);
    shift = std::max(shift, log_w[i]);
  }
  FilterMoments out;
  out.log_shift = shift;
  if (!std::isfinite(shift)) return out;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double w = rule.weights[i] * std::exp(log_w[i] - shift);
    out.weight += w;
    out.first += w * rule.nodes[i];
  }
  return out;
}

}  // namespace

FilterStats filter_stats(const PacketSpec& spec, const BarrierConfig& cfg) {
  validate(cfg);
  FilterMoments coarse = filter_moments(spec, cfg, 128);
  FilterMoments fine = filter_moments(spec, cfg, 256);
  for (std::size_t panels = 512; panels <= 8192; panels *= 2) {
    if (!(fine.weight > 0.0)) break;
    const double a = coarse.first / coarse.weight;
    const double b = fine.first / fine.weight;
    if (std::abs(a - b) <= 1e-13 * std::abs(b)) break;
    coarse = fine;
    fine = filter_moments(spec, cfg, panels);
  }
  if (!(fine.weight > 0.0) || !std::isfinite(fine.log_shift)) {
    throw NumericalDegeneracyError(fmt::format("transmitted weight vanished for L={}", cfg.width));
  }
  FilterStats stats;
  stats.p_mean = fine.first / fine.weight;
  stats.e_mean = total_energy(stats.p_mean, cfg.mass);
  stats.v_out = stats.p_mean / stats.e_mean;
  stats.transmitted_weight = fine.weight * std::exp(fine.log_shift);
  return stats;
}

FilteredDistributions filtered_distributions(std::span<const double> momenta, const PacketSpec& spec,
                                             const BarrierConfig& cfg) {
  FilteredDistributions out;
  out.g_t.reserve(momenta.size());
  out.f_t.reserve(momenta.size());
  for (const double p : momenta) {
    if (!spec.window.contains(p)) {
      throw DomainError(fmt::format("sample p={} outside the window [{}, {}]", p, spec.window.lo, spec.window.hi));
    }
    const double gt = momentum_weight(p, spec) * transmission_polar(p, cfg).magnitude();
    out.g_t.push_back(gt);
    out.f_t.push_back(spinor_component_ratio(p, cfg.mass) * gt);
  }
  return out;
}

}  // namespace dirac_tunnel
