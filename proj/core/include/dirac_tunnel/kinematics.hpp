#pragma once

#include <string_view>

namespace dirac_tunnel {

// Natural units throughout: hbar = c = 1, energies and momenta in units of the
// electron mass, lengths and times in units of its inverse.

/// Rectangular electrostatic barrier of height v0 occupying [offset, offset + width].
struct BarrierConfig {
  double v0 = 1.0;
  double width = 0.0;
  double mass = 1.0;
  double offset = 0.0;
};

/// Throws UnsupportedRegimeError when v0 < mass, DomainError for a
/// non-positive mass or a negative width.
void validate(const BarrierConfig& cfg);

enum class EnergyZone { Diffusion, DiracTunneling, KleinTunneling, KleinZone };

std::string_view to_string(EnergyZone zone);

/// Closed momentum interval [lo, hi] over which the incoming energy lies in
/// the Dirac tunneling zone.
struct MomentumWindow {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double p) const noexcept { return p >= lo && p <= hi; }
};

double total_energy(double p, double mass) noexcept;

/// Relativistic group velocity p / E(p).
double group_velocity(double p, double mass) noexcept;

/// Interior decay rate sqrt(m^2 - (E - V0)^2). Throws DomainError naming the
/// actual zone when |E(p) - V0| > m.
double evanescent_rho(double p, const BarrierConfig& cfg);

/// (sqrt(V0^2 - m^2), sqrt(V0 (V0 + 2m))). Throws UnsupportedRegimeError for V0 < m.
MomentumWindow momentum_window(const BarrierConfig& cfg);

/// Zone of an incoming energy. Boundary energies belong to the evanescent
/// side: E = V0 + m and E = V0 are Dirac tunneling, E = V0 - m is Klein
/// tunneling.
EnergyZone classify_zone(double energy, const BarrierConfig& cfg) noexcept;

}  // namespace dirac_tunnel
