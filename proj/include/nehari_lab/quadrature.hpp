#pragma once

#include <vector>

namespace nehari_lab {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule; nodes ascending. Cached, thread-safe.
const GaussRule& gauss_legendre(int n);

/// Exact quadratic fit c0 + c1 x + c2 x^2 through three points.
struct Quadratic {
  double c0;
  double c1;
  double c2;
};
Quadratic fit_quadratic(const double x[3], const double y[3]);

}  // namespace nehari_lab
