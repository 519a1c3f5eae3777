#pragma once

#include <cstddef>
#include <vector>

namespace dirac_tunnel {

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule from Newton iteration on P_n. Throws DomainError for n == 0.
GaussLegendreRule gauss_legendre(std::size_t n);

/// Composite rule: [lo, hi] split into `panels` equal panels, each carrying
/// the same `order`-point Gauss-Legendre rule.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

CompositeRule composite_gauss_legendre(double lo, double hi, std::size_t panels, std::size_t order);

/// Sum of w_i f(x_i) over a composite rule.
template <typename F>
auto integrate(const CompositeRule& rule, F&& f) {
  using R = decltype(f(0.0) * 1.0);
  R acc{};
  for (std::size_t i = 0; i < rule.size(); ++i) acc += f(rule.nodes[i]) * rule.weights[i];
  return acc;
}

}  // namespace dirac_tunnel
