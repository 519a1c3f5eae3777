#include "dirac_tunnel/barrier_scattering.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

#include "dirac_tunnel/errors.hpp"

namespace dirac_tunnel {
namespace {

// Below this the closed form switches to its analytic limits.
constexpr double kEdgeCutoff = 1e-8;

void require_dirac_momentum(double p, const BarrierConfig& cfg) {
  const double e = total_energy(p, cfg.mass);
  const double w = e - cfg.v0;
  // Window endpoints computed in floating point can land a few ulps outside.
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (cfg.v0 + cfg.mass);
  if (!(p >= 0.0) || w < -slack || w > cfg.mass + slack) {
    throw DomainError(fmt::format("momentum p={} (E={}) is not in the Dirac tunneling window (zone: {})", p, e,
                                  to_string(classify_zone(e, cfg))));
  }
}

}  // namespace

Spinor free_spinor(complex p, double energy, double mass) noexcept {
  return {complex{1.0, 0.0}, complex{}, p / (energy + mass), complex{}};
}

MatchingSolution solve_matching(double p, const BarrierConfig& cfg) {
  validate(cfg);
  require_dirac_momentum(p, cfg);
  const double m = cfg.mass;
  const double e = total_energy(p, m);
  const double rho = evanescent_rho(p, cfg);
  if (p <= 0.0 || rho <= 0.0) {
    throw NumericalDegeneracyError(
        fmt::format("continuity system is singular at p={} (rho={}); use the closed-form limits", p, rho));
  }

  // Lower/upper component ratios of the exterior and interior spinors.
  const complex k{p / (e + m), 0.0};
  const complex kappa{0.0, rho / (e - cfg.v0 + m)};
  const double x = std::exp(-rho * cfg.width);
  const complex ea = std::polar(1.0, p * cfg.offset);

  const complex delta = (k + kappa) * (k + kappa) - (k - kappa) * (k - kappa) * (x * x);
  if (std::abs(delta) == 0.0 || !std::isfinite(std::abs(delta))) {
    throw NumericalDegeneracyError(fmt::format("continuity determinant vanished at p={}", p));
  }

  MatchingSolution sol;
  sol.t = 4.0 * k * kappa * x * std::polar(1.0, -p * cfg.width) / delta;
  sol.a = 2.0 * k * (kappa + k) * ea / delta;
  sol.b = 2.0 * k * (kappa - k) * x * ea / delta;
  sol.r = ea * ea * (k * k - kappa * kappa) * (1.0 - x * x) / delta;
  return sol;
}

Spinor stationary_state(double z, double p, const BarrierConfig& cfg, const MatchingSolution& sol) {
  const double m = cfg.mass;
  const double e = total_energy(p, m);
  const double left = cfg.offset;
  const double right = cfg.offset + cfg.width;

  auto combine = [](const Spinor& u, complex cu, const Spinor& v, complex cv) {
    Spinor out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = cu * u[i] + cv * v[i];
    return out;
  };

  if (z < left) {
    return combine(free_spinor(p, e, m), std::polar(1.0, p * z), free_spinor(-p, e, m) , sol.r * std::polar(1.0, -p * z));
  }
  if (z > right) {
    const Spinor u = free_spinor(p, e, m);
    return combine(u, sol.t * std::polar(1.0, p * z), u, complex{});
  }
  const double rho = evanescent_rho(p, cfg);
  const double w = e - cfg.v0;
  return combine(free_spinor(complex{0.0, rho}, w, m), sol.a * std::exp(-rho * (z - left)),
                 free_spinor(complex{0.0, -rho}, w, m), sol.b * std::exp(rho * (z - right)));
}

double TransmissionPolar::magnitude() const noexcept { return std::exp(log_magnitude); }

TransmissionPolar transmission_polar(double p, const BarrierConfig& cfg) {
  validate(cfg);
  require_dirac_momentum(p, cfg);
  const double length = cfg.width;
  if (length == 0.0) return {0.0, 0.0};
  if (p < kEdgeCutoff) {
    // c = (p^2 - V0 E)/(p rho) diverges to -inf, so |T| -> 0 and theta -> -pi/2.
    return {-std::numeric_limits<double>::infinity(), -std::numbers::pi / 2.0};
  }

  const double e = total_energy(p, cfg.mass);
  const double rho = evanescent_rho(p, cfg);
  const double x = rho * length;
  const double decay2 = std::exp(-2.0 * x);
  // (1 - e^{-2 rho L}) / rho, which tends to 2L as rho -> 0.
  const double sinh_factor = rho < kEdgeCutoff ? 2.0 * length : -std::expm1(-2.0 * x) / rho;
  // 2 e^{-rho L} D = (1 + e^{-2 rho L}) - i q, with D the closed-form denominator.
  const double re = 1.0 + decay2;
  const double q = (p * p - cfg.v0 * e) / p * sinh_factor;
  return {std::log(2.0) - x - std::log(std::hypot(re, q)), std::atan2(q, re)};
}

complex transmission_amplitude(double p, const BarrierConfig& cfg) {
  const TransmissionPolar polar = transmission_polar(p, cfg);
  return std::polar(polar.magnitude(), polar.theta - p * cfg.width);
}

double transmission_phase(double p, const BarrierConfig& cfg) { return transmission_polar(p, cfg).theta; }

double opaque_transmission_magnitude(double p, const BarrierConfig& cfg) {
  validate(cfg);
  const double rho = evanescent_rho(p, cfg);
  return 2.0 * p * rho * std::exp(-rho * cfg.width) / (cfg.mass * cfg.v0);
}

std::string matching_record_json(double p, const BarrierConfig& cfg, const MatchingSolution& sol) {
  auto pair = [](complex c) { return nlohmann::json::array({c.real(), c.imag()}); };
  const nlohmann::json record = {
      {"p", p},           {"L", cfg.width},  {"V0", cfg.v0}, {"m", cfg.mass}, {"offset", cfg.offset},
      {"R", pair(sol.r)}, {"A", pair(sol.a)}, {"B", pair(sol.b)}, {"T", pair(sol.t)},
  };
  return record.dump();
}

}  // namespace dirac_tunnel
