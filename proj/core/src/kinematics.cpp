#include "dirac_tunnel/kinematics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "dirac_tunnel/errors.hpp"

namespace dirac_tunnel {

void validate(const BarrierConfig& cfg) {
  if (!(cfg.mass > 0.0) || !std::isfinite(cfg.mass)) {
    throw DomainError(fmt::format("particle mass must be positive and finite, got {}", cfg.mass));
  }
  if (!(cfg.width >= 0.0) || !std::isfinite(cfg.width)) {
    throw DomainError(fmt::format("barrier width must be non-negative and finite, got {}", cfg.width));
  }
  if (!std::isfinite(cfg.offset)) {
    throw DomainError("barrier offset must be finite");
  }
  if (!(cfg.v0 >= cfg.mass) || !std::isfinite(cfg.v0)) {
    throw UnsupportedRegimeError(fmt::format(
        "barrier height V0={} must be at least the mass m={}; the V0 < m regime is not modelled",
        cfg.v0, cfg.mass));
  }
}

std::string_view to_string(EnergyZone zone) {
  switch (zone) {
    case EnergyZone::Diffusion: return "diffusion";
    case EnergyZone::DiracTunneling: return "dirac-tunneling";
    case EnergyZone::KleinTunneling: return "klein-tunneling";
    case EnergyZone::KleinZone: return "klein-zone";
  }
  return "unknown";
}

double total_energy(double p, double mass) noexcept { return std::hypot(p, mass); }

double group_velocity(double p, double mass) noexcept { return p / total_energy(p, mass); }

double evanescent_rho(double p, const BarrierConfig& cfg) {
  const double m = cfg.mass;
  const double excess = total_energy(p, m) - cfg.v0;
  // (m - w)(m + w) loses less precision than m^2 - w^2 near the window edges.
  const double rho_sq = (m - excess) * (m + excess);
  // E(p_max) can land a few ulps above V0 + m.
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() * m * m;
  if (rho_sq < -slack) {
    throw DomainError(fmt::format("momentum p={} gives E-V0={} outside the evanescent band (zone: {})", p,
                                  excess, to_string(classify_zone(excess + cfg.v0, cfg))));
  }
  return rho_sq > 0.0 ? std::sqrt(rho_sq) : 0.0;
}

MomentumWindow momentum_window(const BarrierConfig& cfg) {
  if (!(cfg.v0 >= cfg.mass)) {
    throw UnsupportedRegimeError(fmt::format(
        "no Dirac tunneling window for V0={} < m={}", cfg.v0, cfg.mass));
  }
  const double lo = std::sqrt((cfg.v0 - cfg.mass) * (cfg.v0 + cfg.mass));
  const double hi = std::sqrt(cfg.v0 * (cfg.v0 + 2.0 * cfg.mass));
  return {lo, hi};
}

EnergyZone classify_zone(double energy, const BarrierConfig& cfg) noexcept {
  const double w = energy - cfg.v0;
  if (w > cfg.mass) return EnergyZone::Diffusion;
  if (w >= 0.0) return EnergyZone::DiracTunneling;
  if (w >= -cfg.mass) return EnergyZone::KleinTunneling;
  return EnergyZone::KleinZone;
}

}  // namespace dirac_tunnel
