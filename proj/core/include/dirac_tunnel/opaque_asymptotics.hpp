#pragma once

#include "dirac_tunnel/kinematics.hpp"

namespace dirac_tunnel {

/// Near the top of the window the transmission phase and the energy expand
/// as theta ~ theta_max - a1 rho and E ~ E_max - a2 rho^2.
struct SeriesCoefficients {
  double a1 = 0.0;  // sqrt(V0 (V0 + 2m)) / (m V0)
  double a2 = 0.0;  // 1 / (2m)
};

/// Throws UnsupportedRegimeError for V0 < m.
SeriesCoefficients series_coefficients(const BarrierConfig& cfg);

enum class MomentMode {
  kExact,       // int_0^m rho^n e^{-rho L} d rho
  kAsymptotic,  // n! / L^{n+1}
};

/// Lower incomplete gamma function gamma(n + 1, x) for small integer n.
double lower_incomplete_gamma(int n_plus_one, double x);

/// s(n) moment. Requires n >= 0 and L > 0 (DomainError otherwise).
double moment_s(int n, double length, double mass, MomentMode mode);

/// Squared modulus of the second-order expansion of the opaque transmitted
/// amplitude at z = L:
///   | s2 - [(a2 t)^2 s6 + a1^2 s4]/2 + a1 a2 t s5 + i [a2 t s4 - a1 s3] |^2
double peak_functional(double t, double length, double mass, const SeriesCoefficients& coeffs, MomentMode mode);

/// The same functional truncated to second order in (a1, a2 t):
///   s2^2 + a1^2 [s3^2 - s2 s4] + 2 a1 a2 t [s2 s5 - s3 s4] + (a2 t)^2 [s4^2 - s2 s6].
/// Its stationary point is exactly opaque_tunneling_time.
double peak_functional_quadratic(double t, double length, double mass, const SeriesCoefficients& coeffs,
                                 MomentMode mode);

/// Stationary point of the quadratic functional:
///   tau = a1 [s2 s5 - s3 s4] / (a2 [s2 s6 - s4^2]).
/// With asymptotic moments this is a1 L / (9 a2).
double opaque_tunneling_time(double length, double mass, const SeriesCoefficients& coeffs,
                             MomentMode mode = MomentMode::kAsymptotic);

/// Maximises peak_functional by golden-section search on
/// [0, 10 a1 L / (9 a2)] to absolute tolerance `tol`.
double maximize_peak_functional(double length, double mass, const SeriesCoefficients& coeffs, MomentMode mode,
                                double tol = 1e-10);

/// (9/2) sqrt(V0 / (V0 + 2m)); independent of L. Throws UnsupportedRegimeError
/// for V0 < m.
double opaque_tunneling_velocity(const BarrierConfig& cfg);

/// The closed form alone, for any V0 > 0 and m > 0. Used to examine the
/// non-relativistic limit, which lies outside the modelled barrier regime.
double opaque_velocity_formula(double v0, double mass);

struct OpaqueSolution {
  double tau = 0.0;
  double v = 0.0;  // L / tau
};

OpaqueSolution solve_opaque(const BarrierConfig& cfg, MomentMode mode = MomentMode::kAsymptotic);

}  // namespace dirac_tunnel
