#pragma once

#include <array>
#include <complex>
#include <string>

#include "dirac_tunnel/kinematics.hpp"

namespace dirac_tunnel {

using complex = std::complex<double>;

/// Four-component Dirac spinor (Pauli-Dirac representation). For motion along
/// z without spin flip only components 0 and 2 are ever populated.
using Spinor = std::array<complex, 4>;

/// [1, 0, p/(E+m), 0]. Takes a complex momentum so the interior solutions
/// u(+-i rho, E - V0) come from the same expression.
Spinor free_spinor(complex p, double energy, double mass) noexcept;

/// Coefficients of the stationary scattering state with unit incident
/// amplitude:
///   region I   : u(p,E) e^{ipz} + r u(-p,E) e^{-ipz}
///   region II  : a u(i rho, E-V0) e^{-rho (z-a0)} + b u(-i rho, E-V0) e^{rho (z-a0-L)}
///   region III : t u(p,E) e^{ipz}
/// where a0 is the barrier offset. The interior basis is normalised at the
/// edge where each exponential is largest, so a and b stay O(1) however
/// opaque the barrier is. For a0 = 0 the growing-mode coefficient differs
/// from the unscaled e^{+rho z} convention by the factor e^{-rho L}.
struct MatchingSolution {
  complex r;
  complex a;
  complex b;
  complex t;
};

/// Solves the four continuity conditions at z = a0 and z = a0 + L for a
/// momentum in the open Dirac window. Throws DomainError outside the window
/// and NumericalDegeneracyError if the elimination breaks down (rho = 0 or
/// p = 0).
MatchingSolution solve_matching(double p, const BarrierConfig& cfg);

/// One-line JSON record {p, L, V0, m, offset, R, A, B, T}; complex values
/// are [re, im] pairs. Used for regression goldens.
std::string matching_record_json(double p, const BarrierConfig& cfg, const MatchingSolution& sol);

/// Evaluates the stationary solution described by `sol` at position z.
Spinor stationary_state(double z, double p, const BarrierConfig& cfg, const MatchingSolution& sol);

/// Transmission amplitude in polar form, log|T| and the phase theta of the
/// barrier factor, so that T = exp(log_magnitude) e^{i(theta - pL)}.
struct TransmissionPolar {
  double log_magnitude;
  double theta;

  double magnitude() const noexcept;
};

/// Closed-form transmission, evaluated in a scaled form that neither
/// overflows for large rho L nor divides 0/0 at the window edges.
TransmissionPolar transmission_polar(double p, const BarrierConfig& cfg);

/// e^{-ipL} / [cosh(rho L) - i (p^2 - V0 E)/(p rho) sinh(rho L)].
complex transmission_amplitude(double p, const BarrierConfig& cfg);

/// theta = atan((p^2 - V0 E)/(p rho) tanh(rho L)), in (-pi/2, pi/2).
double transmission_phase(double p, const BarrierConfig& cfg);

/// Opaque-barrier approximation 2 p rho e^{-rho L} / (m V0).
double opaque_transmission_magnitude(double p, const BarrierConfig& cfg);

}  // namespace dirac_tunnel
