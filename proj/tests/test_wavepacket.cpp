#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include "dirac_tunnel/barrier_scattering.hpp"
#include "dirac_tunnel/errors.hpp"
#include "dirac_tunnel/parallel.hpp"
#include "dirac_tunnel/wavepacket.hpp"

using namespace dirac_tunnel;

namespace {

const double kSqrt3 = std::numbers::sqrt3;
const double kP0 = kSqrt3 / 2.0;

BarrierConfig reference(double width, double offset = 0.0) { return {1.0, width, 1.0, offset}; }
PacketSpec reference_spec() { return make_packet_spec(kP0, 10.0, reference(0.0)); }

template <typename F>
double kronrod(F f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-14);
}

// int (g^2 + f^2) dp over the window, with g = exp(-(p - p0)^2 d^2 / 4).
double momentum_norm(double p0, double d, double lo, double hi) {
  return kronrod(
      [&](double p) {
        const double g = std::exp(-(p - p0) * (p - p0) * d * d / 4.0);
        const double ratio = p / (std::hypot(p, 1.0) + 1.0);
        return g * g * (1.0 + ratio * ratio);
      },
      lo, hi);
}

}  // namespace

TEST_CASE("momentum weight") {
  const PacketSpec spec = reference_spec();
  CHECK(momentum_weight(kP0, spec) == 1.0);
  CHECK(momentum_weight(kP0 + 2.0 / 10.0, spec) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(momentum_weight(-0.1, spec) == 0.0);
  CHECK(momentum_weight(kSqrt3 + 0.01, spec) == 0.0);
}

TEST_CASE("packet spec validation") {
  CHECK_THROWS_AS(make_packet_spec(2.0, 10.0, reference(0.0)), DomainError);
  CHECK_THROWS_AS(make_packet_spec(kP0, 0.0, reference(0.0)), DomainError);
  CHECK_THROWS_AS(make_packet_spec(kP0, 10.0, BarrierConfig{0.5, 0.0, 1.0, 0.0}), UnsupportedRegimeError);
  const PacketSpec spec = reference_spec();
  CHECK(spec.window.lo == 0.0);
  CHECK(spec.window.hi == doctest::Approx(kSqrt3));
}

TEST_CASE("spinor density and component ratio") {
  CHECK(density(Spinor{complex(1.0), {}, {}, {}}) == 1.0);
  CHECK(density(Spinor{complex(1.0), {}, complex(0.0, 1.0), {}}) == 2.0);
  CHECK(density(Spinor{}) == 0.0);
  CHECK(spinor_component_ratio(kP0, 1.0) == doctest::Approx(0.3728).epsilon(1e-3));
  CHECK(spinor_component_ratio(kSqrt3, 1.0) == doctest::Approx(1.0 / kSqrt3).epsilon(1e-14));
}

TEST_CASE("momentum-norm scaling") {
  const PacketSpec spec = reference_spec();
  const double norm = momentum_norm(kP0, 10.0, 0.0, kSqrt3);
  const PacketEvaluator scaled = PacketEvaluator::incident(spec, 1.0, {}, Normalization::kMomentumNorm2);
  const PacketEvaluator raw = PacketEvaluator::incident(spec, 1.0);
  CHECK(raw.density_scale() == 1.0);
  CHECK(scaled.density_scale() == doctest::Approx(2.0 / norm).epsilon(1e-10));
  CHECK(scaled.density(3.0, 4.0) == doctest::Approx(raw.density(3.0, 4.0) * 2.0 / norm).epsilon(1e-10));
}

TEST_CASE("an empty barrier transmits the incident packet") {
  const PacketSpec spec = reference_spec();
  for (const double z : {0.0, 5.0, 20.0, 40.0}) {
    for (const double t : {-30.0, 0.0, 10.0, 60.0}) {
      const Spinor inc = incident_packet(z, t, spec);
      const Spinor tr = transmitted_packet(z, t, spec, reference(0.0));
      const double scale = std::sqrt(density(inc));
      for (int c = 0; c < 4; ++c) CHECK(std::abs(inc[c] - tr[c]) <= 1e-8 * scale + 1e-14);
    }
  }
}

TEST_CASE("transmitted density at the exit of an L=10 barrier") {
  const PacketSpec spec = reference_spec();
  const PacketEvaluator tr = PacketEvaluator::transmitted(spec, reference(10.0));
  const double peak = tr.density(10.0, 2.05);
  CHECK(peak > tr.density(10.0, 1.8));
  CHECK(peak > tr.density(10.0, 2.3));
  CHECK(tr.density(10.0, 1e4) < 1e-12 * peak);
  CHECK(tr.density(10.0, -1e4) < 1e-12 * peak);
  CHECK_THROWS_AS(tr.evaluate(5.0, 0.0), DomainError);
}

TEST_CASE("doubling the nodes leaves the peak density unchanged") {
  const PacketSpec spec = reference_spec();
  for (const double l : {10.0, 30.0, 100.0}) {
    const PacketEvaluator tr = PacketEvaluator::transmitted(spec, reference(l));
    const double t = l < 50.0 ? 2.5 : 36.35;
    const PacketEvaluation ev = tr.evaluate(l, t);
    const double coarse = density(tr.evaluate_fixed(l, t, ev.nodes));
    const double fine = density(tr.evaluate_fixed(l, t, 2 * ev.nodes));
    CHECK(std::abs(fine - coarse) < 1e-8 * fine);
    CHECK(ev.error_estimate <= 1e-10 * std::sqrt(density(ev.amplitude)) + 1e-10);
  }
}

TEST_CASE("non-convergence reports the last estimate") {
  QuadratureOptions opts;
  opts.min_nodes = 32;
  opts.max_nodes = 64;
  const PacketEvaluator inc = PacketEvaluator::incident(reference_spec(), 1.0, opts);
  try {
    inc.evaluate(500.0, 800.0);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(std::isfinite(e.estimate()));
    CHECK(e.error_estimate() > 0.0);
  }
}

TEST_CASE("free packet keeps its norm") {
  const PacketSpec spec = reference_spec();
  const PacketEvaluator inc = PacketEvaluator::incident(spec, 1.0);
  const double exact = 2.0 * std::numbers::pi * momentum_norm(kP0, 10.0, 0.0, kSqrt3);
  const double dz = 0.1;
  for (const double t : {0.0, 30.0, 60.0}) {
    const double centre = group_velocity(kP0, 1.0) * t;
    std::vector<double> zs;
    for (double z = centre - 120.0; z <= centre + 120.0; z += dz) zs.push_back(z);
    const DensityGrid grid = inc.density_over_space(zs, t);
    double sum = 0.0;
    for (const double v : grid.values) sum += v * dz;
    CHECK(std::abs(sum - exact) / exact < 1e-3);
  }
}

TEST_CASE("free packet peak follows the group velocity") {
  const PacketEvaluator inc = PacketEvaluator::incident(reference_spec(), 1.0);
  auto argmax_z = [&](double t, double lo, double hi) {
    std::vector<double> zs;
    for (double z = lo; z <= hi; z += 0.01) zs.push_back(z);
    const DensityGrid g = inc.density_over_space(zs, t);
    return g.axis[std::max_element(g.values.begin(), g.values.end()) - g.values.begin()];
  };
  CHECK(std::abs(argmax_z(0.0, -5.0, 5.0)) < 0.02);
  const double v0 = group_velocity(kP0, 1.0);
  const double z100 = argmax_z(100.0, 50.0, 80.0);
  CHECK(z100 == doctest::Approx(v0 * 100.0).epsilon(0.01));
}

TEST_CASE("concurrent evaluation matches serial evaluation") {
  const PacketEvaluator tr = PacketEvaluator::transmitted(reference_spec(), reference(20.0));
  std::vector<double> serial(64);
  for (std::size_t i = 0; i < serial.size(); ++i) serial[i] = tr.density(25.0, -40.0 + 1.5 * i);
  std::vector<double> threaded(64);
  const PacketEvaluator copy = tr;
  parallel_for(threaded.size(), [&](std::size_t i) { threaded[i] = copy.density(25.0, -40.0 + 1.5 * i); });
  CHECK(serial == threaded);
  const double times[] = {0.0, 1.0, 2.0};
  const DensityGrid grid = tr.density_over_time(25.0, times);
  CHECK(grid.axis.size() == 3);
  CHECK(grid.values[1] == tr.density(25.0, 1.0));
}

TEST_CASE("filter statistics for an empty barrier follow the window truncation") {
  const PacketSpec spec = reference_spec();
  const FilterStats s = filter_stats(spec, reference(0.0));
  const double w = momentum_norm(kP0, 10.0, 0.0, kSqrt3);
  const double first = kronrod(
      [&](double p) {
        const double g = std::exp(-(p - kP0) * (p - kP0) * 25.0);
        const double ratio = p / (std::hypot(p, 1.0) + 1.0);
        return p * g * g * (1.0 + ratio * ratio);
      },
      0.0, kSqrt3);
  CHECK(s.transmitted_weight == doctest::Approx(w).epsilon(1e-10));
  CHECK(s.p_mean == doctest::Approx(first / w).epsilon(1e-10));
  CHECK(s.p_mean > kP0);
  CHECK(s.p_mean < kP0 + 0.01);
  CHECK(s.e_mean == doctest::Approx(std::hypot(s.p_mean, 1.0)).epsilon(1e-15));
}

TEST_CASE("filter effect raises the mean momentum with the barrier width") {
  const PacketSpec spec = reference_spec();
  double previous = 0.0;
  for (const double l : {0.0, 5.0, 10.0, 20.0, 50.0}) {
    const FilterStats s = filter_stats(spec, reference(l));
    CHECK(s.p_mean >= previous);
    CHECK(s.p_mean >= kP0);
    CHECK(s.p_mean <= kSqrt3);
    CHECK(s.v_out > 0.0);
    CHECK(s.v_out < 1.0);
    previous = s.p_mean;
  }
  const FilterStats thick = filter_stats(spec, reference(50.0));
  CHECK(std::abs(thick.p_mean - kSqrt3) / kSqrt3 < 0.02);
  CHECK(std::abs(spinor_component_ratio(thick.p_mean, 1.0) - 0.577) < 0.005);
}

TEST_CASE("filtered distributions") {
  const PacketSpec spec = reference_spec();
  std::vector<double> ps;
  for (int i = 0; i <= 1000; ++i) ps.push_back(kSqrt3 * i / 1000.0);
  const FilteredDistributions free = filtered_distributions(ps, spec, reference(0.0));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(free.g_t[i] == doctest::Approx(momentum_weight(ps[i], spec)).epsilon(1e-15));
    if (free.g_t[i] > 0.0) {
      const double ratio = free.f_t[i] / free.g_t[i];
      CHECK(ratio == doctest::Approx(ps[i] / (std::hypot(ps[i], 1.0) + 1.0)).epsilon(1e-14));
      CHECK(ratio < 1.0);
    }
  }
  const FilteredDistributions thick = filtered_distributions(ps, spec, reference(20.0));
  const auto peak_free = std::max_element(free.g_t.begin(), free.g_t.end()) - free.g_t.begin();
  const auto peak_thick = std::max_element(thick.g_t.begin(), thick.g_t.end()) - thick.g_t.begin();
  CHECK(ps[peak_free] == doctest::Approx(kP0).epsilon(2e-3));
  CHECK(ps[peak_thick] > ps[peak_free]);
}
