#include <cmath>
#include <limits>
#include <numbers>

#include <doctest.h>

#include "dirac_tunnel/errors.hpp"
#include "dirac_tunnel/kinematics.hpp"

using namespace dirac_tunnel;

namespace {
const double kSqrt3 = std::numbers::sqrt3;
BarrierConfig barrier(double v0, double mass = 1.0) { return {v0, 0.0, mass, 0.0}; }
}  // namespace

TEST_CASE("total energy") {
  CHECK(total_energy(0.0, 1.0) == 1.0);
  CHECK(total_energy(kSqrt3, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  // sqrt(7)/2 to 20 digits: 1.3228756555322952953
  CHECK(total_energy(kSqrt3 / 2.0, 1.0) == doctest::Approx(1.3228756555322952953).epsilon(1e-15));
}

TEST_CASE("group velocity") {
  CHECK(group_velocity(kSqrt3 / 2.0, 1.0) == doctest::Approx(kSqrt3 / std::sqrt(7.0)).epsilon(1e-15));
  CHECK(group_velocity(0.0, 1.0) == 0.0);
  CHECK(group_velocity(kSqrt3, 1.0) == doctest::Approx(kSqrt3 / 2.0).epsilon(1e-15));

  double previous = -1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double v = group_velocity(0.01 * i, 1.0);
    CHECK(v > previous);
    CHECK(v < 1.0);
    previous = v;
  }
}

TEST_CASE("evanescent decay rate") {
  const BarrierConfig b = barrier(1.0);
  CHECK(evanescent_rho(0.0, b) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(evanescent_rho(kSqrt3, b) == doctest::Approx(0.0).epsilon(1e-7));
  // sqrt(1 - (sqrt(7)/2 - 1)^2) = 0.94643...; reference from the closed form in long double.
  const long double e = std::sqrt(7.0L) / 2.0L;
  const long double ref = std::sqrt(1.0L - (e - 1.0L) * (e - 1.0L));
  CHECK(evanescent_rho(kSqrt3 / 2.0, b) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
  CHECK(evanescent_rho(kSqrt3 / 2.0, b) == doctest::Approx(0.94643).epsilon(1e-5));

  CHECK_THROWS_AS(evanescent_rho(2.5, b), DomainError);
  CHECK_THROWS_WITH(evanescent_rho(2.5, b), doctest::Contains("diffusion"));
}

TEST_CASE("rho and energy satisfy the evanescent identity across the window") {
  for (const double v0 : {1.0, 1.5, 2.0, 7.0}) {
    const BarrierConfig b = barrier(v0);
    const MomentumWindow w = momentum_window(b);
    for (int i = 1; i < 500; ++i) {
      const double p = w.lo + w.width() * i / 500.0;
      const double rho = evanescent_rho(p, b);
      const double de = total_energy(p, 1.0) - v0;
      CHECK(rho * rho + de * de == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("momentum window") {
  const MomentumWindow unit = momentum_window(barrier(1.0));
  CHECK(unit.lo == 0.0);
  CHECK(unit.hi == doctest::Approx(kSqrt3).epsilon(1e-15));
  const MomentumWindow two = momentum_window(barrier(2.0));
  CHECK(two.lo == doctest::Approx(kSqrt3).epsilon(1e-15));
  CHECK(two.hi == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));

  for (const double v0 : {1.0, 1.25, 3.0, 40.0}) {
    const MomentumWindow w = momentum_window(barrier(v0));
    CHECK(total_energy(w.lo, 1.0) == doctest::Approx(v0).epsilon(1e-12));
    CHECK(total_energy(w.hi, 1.0) == doctest::Approx(v0 + 1.0).epsilon(1e-12));
    CHECK(evanescent_rho(w.hi, barrier(v0)) < 1e-6);
  }
  CHECK_THROWS_AS(momentum_window(barrier(0.5)), UnsupportedRegimeError);
}

TEST_CASE("zone classification") {
  const BarrierConfig b = barrier(1.0);
  CHECK(classify_zone(1.5, b) == EnergyZone::DiracTunneling);
  CHECK(classify_zone(3.0, b) == EnergyZone::Diffusion);
  CHECK(classify_zone(2.0, barrier(4.0)) == EnergyZone::KleinZone);
  CHECK(classify_zone(0.5, b) == EnergyZone::KleinTunneling);

  // Boundaries sit on the evanescent side.
  CHECK(classify_zone(2.0, b) == EnergyZone::DiracTunneling);
  CHECK(classify_zone(1.0, b) == EnergyZone::DiracTunneling);
  CHECK(classify_zone(2.0, barrier(3.0)) == EnergyZone::KleinTunneling);

  for (const double v0 : {1.0, 2.0, 5.0}) {
    const BarrierConfig bv = barrier(v0);
    const MomentumWindow w = momentum_window(bv);
    for (int i = 1; i < 200; ++i) {
      const double p = w.lo + w.width() * i / 200.0;
      CHECK(classify_zone(total_energy(p, 1.0), bv) == EnergyZone::DiracTunneling);
    }
  }
  CHECK(to_string(EnergyZone::KleinZone) == "klein-zone");
}

TEST_CASE("barrier validation") {
  CHECK_NOTHROW(validate(BarrierConfig{1.0, 10.0, 1.0, 0.0}));
  CHECK_THROWS_AS(validate(BarrierConfig{0.5, 10.0, 1.0, 0.0}), UnsupportedRegimeError);
  CHECK_THROWS_AS(validate(BarrierConfig{2.0, -1.0, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate(BarrierConfig{2.0, 1.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate(BarrierConfig{2.0, 1.0, 1.0, std::numeric_limits<double>::infinity()}), DomainError);
}
