#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "dirac_tunnel/errors.hpp"
#include "dirac_tunnel/opaque_asymptotics.hpp"
#include "dirac_tunnel/transit_analysis.hpp"

using namespace dirac_tunnel;

namespace {

const double kSqrt3 = std::numbers::sqrt3;
const double kP0 = kSqrt3 / 2.0;

BarrierConfig reference(double width, double offset = 0.0) { return {1.0, width, 1.0, offset}; }
PacketSpec reference_spec() { return make_packet_spec(kP0, 10.0, reference(0.0)); }

std::vector<PeakRecord> of_kind(const std::vector<PeakRecord>& peaks, PeakKind kind) {
  std::vector<PeakRecord> out;
  std::copy_if(peaks.begin(), peaks.end(), std::back_inserter(out), [&](const PeakRecord& r) { return r.kind == kind; });
  return out;
}

}  // namespace

TEST_CASE("peaks at the exit of an L=10 barrier") {
  const std::vector<PeakRecord> peaks = scan_peaks(10.0, reference_spec(), reference(10.0));
  const PeakRecord& central = central_peak(peaks);
  CHECK(central.time == doctest::Approx(2.05).epsilon(0.05));

  for (std::size_t i = 0; i < peaks.size(); ++i) {
    CHECK(peaks[i].density >= 0.0);
    CHECK(peaks[i].density <= central.density);
    if (i > 0) {
      CHECK(peaks[i].time > peaks[i - 1].time);
      // Minima and maxima alternate.
      CHECK((peaks[i].kind == PeakKind::Minimum) != (peaks[i - 1].kind == PeakKind::Minimum));
    }
  }
  CHECK(of_kind(peaks, PeakKind::CentralMax).size() == 1);

  const auto secondaries = of_kind(peaks, PeakKind::SecondaryMax);
  const auto before = std::find_if(secondaries.rbegin(), secondaries.rend(),
                                   [&](const PeakRecord& r) { return r.time < central.time; });
  const auto after = std::find_if(secondaries.begin(), secondaries.end(),
                                  [&](const PeakRecord& r) { return r.time > central.time; });
  REQUIRE(before != secondaries.rend());
  REQUIRE(after != secondaries.end());
  CHECK(before->time == doctest::Approx(-65.97).epsilon(0.02));
  CHECK(after->time == doctest::Approx(71.14).epsilon(0.02));
}

TEST_CASE("an opaque barrier leaves a single peak") {
  const std::vector<PeakRecord> peaks = scan_peaks(50.0, reference_spec(), reference(50.0));
  CHECK(peaks.size() == 1);
  CHECK(central_peak(peaks).time == doctest::Approx(15.66).epsilon(0.05));
}

TEST_CASE("halving the scan step does not move any peak") {
  ScanOptions coarse;
  ScanOptions fine;
  fine.step = coarse.step / 2.0;
  for (const double l : {10.0, 25.0}) {
    const auto a = scan_peaks(l, reference_spec(), reference(l), coarse);
    const auto b = scan_peaks(l, reference_spec(), reference(l), fine);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].kind == b[i].kind);
      CHECK(std::abs(a[i].time - b[i].time) < 1e-3);
    }
  }
}

TEST_CASE("scan errors") {
  ScanOptions bad;
  bad.step = 0.0;
  CHECK_THROWS_AS(scan_peaks(10.0, reference_spec(), reference(10.0), bad), DomainError);
  // A window on the rising flank of the central peak has no interior maximum.
  ScanOptions tail;
  tail.t_min = 1.0;
  tail.t_max = 1.75;
  CHECK_THROWS_AS(scan_peaks(10.0, reference_spec(), reference(10.0), tail), EmptyResultError);
  CHECK_THROWS_AS(central_peak({}), EmptyResultError);
  CHECK_THROWS_AS(numeric_tunneling_time(reference_spec(), reference(0.0)), DomainError);
}

TEST_CASE("numeric tunneling times") {
  const TunnelingTime thin = numeric_tunneling_time(reference_spec(), reference(10.0));
  CHECK(thin.v == doctest::Approx(10.0 / 2.05).epsilon(0.05));
  CHECK(thin.v == 10.0 / thin.tau);

  const TunnelingTime mid = numeric_tunneling_time(reference_spec(), reference(20.0));
  CHECK(mid.v > 5.0);
  CHECK(mid.v < 15.0);

  const TunnelingTime thick = numeric_tunneling_time(reference_spec(), reference(100.0));
  CHECK(std::abs(thick.v - opaque_tunneling_velocity(reference(100.0))) / 2.598076211353316 < 0.15);
}

TEST_CASE("predicted transit time") {
  CHECK(transit_time_predicted(40.0, 0.0, 3.0, 0.65) == doctest::Approx(40.0 / 0.65));
  CHECK(transit_time_predicted(20.0, 20.0, 2.5, 0.65) == doctest::Approx(20.0 / 2.5));
  CHECK_THROWS_AS(transit_time_predicted(10.0, 20.0, 2.5, 0.65), DomainError);
  CHECK_THROWS_AS(transit_time_predicted(40.0, 20.0, 2.5, 1.2), DomainError);
  CHECK_THROWS_AS(transit_time_predicted(40.0, 20.0, 0.0, 0.5), DomainError);
}

TEST_CASE("superluminal detector bound") {
  CHECK(superluminal_detector_bound(0.9, 0.68, 20.0) == 0.0);
  const double v_tun = 9.0 / (2.0 * kSqrt3);
  const double bound = superluminal_detector_bound(v_tun, 0.68, 20.0);
  CHECK(bound == doctest::Approx(20.0 * (v_tun - 0.68) / (v_tun * 0.32)).epsilon(1e-14));
  CHECK(bound == doctest::Approx(46.1).epsilon(2e-3));
  CHECK(composed_velocity(bound, 20.0, v_tun, 0.68) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(composed_velocity(bound - 1.0, 20.0, v_tun, 0.68) > 1.0);
  CHECK(composed_velocity(bound + 1.0, 20.0, v_tun, 0.68) < 1.0);
}

TEST_CASE("free transit follows the group velocity") {
  const TransitReport r = transit_measure(40.0, reference_spec(), reference(0.0));
  const double v0 = group_velocity(kP0, 1.0);
  CHECK(r.t_dl == doctest::Approx(40.0 / v0).epsilon(0.02));
  CHECK(r.v_dl == 40.0 / r.t_dl);
  CHECK_FALSE(r.superluminal);
  CHECK_THROWS_AS(transit_measure(5.0, reference_spec(), reference(10.0)), DomainError);
}

TEST_CASE("transit times shrink with the barrier width and compose from two legs") {
  const PacketSpec spec = reference_spec();
  double previous = 1e300;
  for (const double l : {0.0, 10.0, 20.0, 30.0}) {
    const TransitReport r = transit_measure(40.0, spec, reference(l));
    CHECK(r.t_dl > 0.0);
    CHECK(r.t_dl < previous);
    previous = r.t_dl;

    const double v_out = measure_outgoing_velocity(40.0, 10.0, spec, reference(l));
    CHECK(v_out > 0.0);
    CHECK(v_out < 1.0);
    const double v_tun = l > 0.0 ? numeric_tunneling_time(spec, reference(l)).v : 1.0;
    const double predicted = transit_time_predicted(40.0, l, v_tun, v_out);
    CHECK(std::abs(predicted - r.t_dl) / r.t_dl < 0.05);
  }
}

TEST_CASE("moving the barrier does not change the transit time") {
  const PacketSpec spec = reference_spec();
  const double base = transit_measure(40.0, spec, reference(20.0, 0.0)).t_dl;
  for (const double offset : {7.5, 20.0}) {
    const double moved = transit_measure(40.0, spec, reference(20.0, offset)).t_dl;
    CHECK(std::abs(moved - base) / base < 0.005);
  }
}
