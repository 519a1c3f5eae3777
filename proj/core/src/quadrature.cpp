#include "dirac_tunnel/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "dirac_tunnel/errors.hpp"

namespace dirac_tunnel {

GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("Gauss-Legendre rule needs at least one node");
  GaussLegendreRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const std::size_t half = (n + 1) / 2;
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd + 1.0) * z * p2 - jd * p3) / (jd + 1.0);
      }
      dp = nd * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

CompositeRule composite_gauss_legendre(double lo, double hi, std::size_t panels, std::size_t order) {
  if (panels == 0) throw DomainError("composite rule needs at least one panel");
  const GaussLegendreRule base = gauss_legendre(order);
  CompositeRule rule;
  rule.nodes.reserve(panels * order);
  rule.weights.reserve(panels * order);
  const double h = (hi - lo) / static_cast<double>(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double a = lo + h * static_cast<double>(k);
    const double mid = a + 0.5 * h;
    for (std::size_t i = 0; i < order; ++i) {
      rule.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
      rule.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return rule;
}

}  // namespace dirac_tunnel
