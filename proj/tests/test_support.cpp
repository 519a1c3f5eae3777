#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "dirac_tunnel/parallel.hpp"
#include "dirac_tunnel/quadrature.hpp"
#include "dirac_tunnel/table_output.hpp"

using namespace dirac_tunnel;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (const std::size_t n : {1u, 2u, 5u, 16u, 40u}) {
    const GaussLegendreRule rule = gauss_legendre(n);
    REQUIRE(rule.nodes.size() == n);
    CHECK(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
    for (std::size_t k = 0; k < 2 * n; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(k));
      const double exact = k % 2 ? 0.0 : 2.0 / static_cast<double>(k + 1);
      CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("composite rule") {
  const CompositeRule rule = composite_gauss_legendre(0.0, std::numbers::pi, 64, 16);
  CHECK(rule.size() == 1024);
  CHECK(integrate(rule, [](double x) { return std::sin(x); }) == doctest::Approx(2.0).epsilon(1e-14));
  const auto osc = integrate(rule, [](double x) { return std::cos(100.0 * x); });
  CHECK(std::abs(osc - std::sin(100.0 * std::numbers::pi) / 100.0) < 1e-13);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 3) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  parallel_for(0, [](std::size_t) { FAIL("no calls expected"); });
}

TEST_CASE("thread cap from the environment") {
  ::setenv("DIRAC_TUNNEL_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  ::setenv("DIRAC_TUNNEL_THREADS", "not-a-number", 1);
  CHECK(worker_count() >= 1);
  ::unsetenv("DIRAC_TUNNEL_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("real formatting round-trips") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(2.0) == "2");
  CHECK(format_real(-1.5e-300) == "-1.5000000000000001e-300");
  for (const double v : {std::numbers::pi, 1.0 / 3.0, 6.02214076e23, -2.5e-17}) {
    CHECK(std::stod(format_real(v)) == v);
  }
}

TEST_CASE("CSV and JSON tables") {
  Table t;
  t.meta = {{"V0", "1"}, {"L", "10"}};
  t.columns = {"x", "label", "n", "flag"};
  t.rows = {{0.5, std::string("a"), std::int64_t{3}, true}, {1.0 / 3.0, std::string("b"), std::int64_t{-1}, false}};
  CHECK(to_csv(t) ==
        "# V0=1 L=10\n"
        "x,label,n,flag\n"
        "0.5,a,3,true\n"
        "0.33333333333333331,b,-1,false\n");
  const auto j = nlohmann::json::parse(to_json(t));
  CHECK(j["meta"]["V0"] == "1");
  CHECK(j["columns"].size() == 4);
  CHECK(j["rows"][1][0].get<double>() == 1.0 / 3.0);
  CHECK(j["rows"][0][3] == true);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
