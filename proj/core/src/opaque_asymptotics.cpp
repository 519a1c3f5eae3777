#include "dirac_tunnel/opaque_asymptotics.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <fmt/format.h>

#include "dirac_tunnel/errors.hpp"

namespace dirac_tunnel {

SeriesCoefficients series_coefficients(const BarrierConfig& cfg) {
  const MomentumWindow window = momentum_window(cfg);
  return {window.hi / (cfg.mass * cfg.v0), 1.0 / (2.0 * cfg.mass)};
}

double lower_incomplete_gamma(int n_plus_one, double x) {
  if (n_plus_one < 1) throw DomainError("lower_incomplete_gamma needs an integer order >= 1");
  if (!(x >= 0.0)) throw DomainError("lower_incomplete_gamma needs x >= 0");
  const double a = n_plus_one;
  if (x < a) {
    // Upward recurrence subtracts nearly equal terms here; the series
    // x^a e^{-x} sum_k x^k / (a (a+1) ... (a+k)) converges fast instead.
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
      term *= x / (a + k);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return sum * std::exp(a * std::log(x) - x);
  }
  // gamma(k+1, x) = k gamma(k, x) - x^k e^{-x}, seeded with gamma(1, x) = 1 - e^{-x}.
  double g = -std::expm1(-x);
  double power = 1.0;
  const double ex = std::exp(-x);
  for (int k = 1; k < n_plus_one; ++k) {
    power *= x;
    g = k * g - power * ex;
  }
  return g;
}

double moment_s(int n, double length, double mass, MomentMode mode) {
  if (n < 0) throw DomainError(fmt::format("moment order must be non-negative, got {}", n));
  if (!(length > 0.0)) throw DomainError(fmt::format("moment needs L > 0, got {}", length));
  if (mode == MomentMode::kAsymptotic) {
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) factorial *= k;
    return factorial / std::pow(length, n + 1);
  }
  return lower_incomplete_gamma(n + 1, mass * length) / std::pow(length, n + 1);
}

namespace {

struct Moments {
  double s2, s3, s4, s5, s6;
};

Moments moments(double length, double mass, MomentMode mode) {
  return {moment_s(2, length, mass, mode), moment_s(3, length, mass, mode), moment_s(4, length, mass, mode),
          moment_s(5, length, mass, mode), moment_s(6, length, mass, mode)};
}

}  // namespace

double peak_functional(double t, double length, double mass, const SeriesCoefficients& c, MomentMode mode) {
  const Moments s = moments(length, mass, mode);
  const double bt = c.a2 * t;
  const std::complex<double> amp{s.s2 - (bt * bt * s.s6 + c.a1 * c.a1 * s.s4) / 2.0 + c.a1 * bt * s.s5,
                                 bt * s.s4 - c.a1 * s.s3};
  return std::norm(amp);
}

double peak_functional_quadratic(double t, double length, double mass, const SeriesCoefficients& c,
                                 MomentMode mode) {
  const Moments s = moments(length, mass, mode);
  const double bt = c.a2 * t;
  return s.s2 * s.s2 + c.a1 * c.a1 * (s.s3 * s.s3 - s.s2 * s.s4) + 2.0 * c.a1 * bt * (s.s2 * s.s5 - s.s3 * s.s4) +
         bt * bt * (s.s4 * s.s4 - s.s2 * s.s6);
}

double opaque_tunneling_time(double length, double mass, const SeriesCoefficients& c, MomentMode mode) {
  const Moments s = moments(length, mass, mode);
  // Scale by L^10 so the asymptotic brackets are O(1) numbers (96 and 864).
  const double l10 = std::pow(length, 10);
  const double linear = (s.s2 * s.s5 - s.s3 * s.s4) * l10;
  const double quadratic = (s.s2 * s.s6 - s.s4 * s.s4) * l10;
  return c.a1 * linear / (c.a2 * quadratic);
}

double maximize_peak_functional(double length, double mass, const SeriesCoefficients& c, MomentMode mode,
                                double tol) {
  const double inv_phi = 1.0 / std::numbers::phi;
  double lo = 0.0;
  double hi = 10.0 * c.a1 * length / (9.0 * c.a2);
  auto f = [&](double t) { return peak_functional(t, length, mass, c, mode); };
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

double opaque_velocity_formula(double v0, double mass) {
  if (!(v0 > 0.0) || !(mass > 0.0)) {
    throw DomainError(fmt::format("velocity formula needs V0 > 0 and m > 0, got V0={}, m={}", v0, mass));
  }
  return 4.5 * std::sqrt(v0 / (v0 + 2.0 * mass));
}

double opaque_tunneling_velocity(const BarrierConfig& cfg) {
  momentum_window(cfg);  // rejects V0 < m
  return opaque_velocity_formula(cfg.v0, cfg.mass);
}

OpaqueSolution solve_opaque(const BarrierConfig& cfg, MomentMode mode) {
  validate(cfg);
  if (!(cfg.width > 0.0)) throw DomainError("opaque solution needs a barrier of positive width");
  const SeriesCoefficients c = series_coefficients(cfg);
  const double tau = opaque_tunneling_time(cfg.width, cfg.mass, c, mode);
  return {tau, cfg.width / tau};
}

}  // namespace dirac_tunnel
