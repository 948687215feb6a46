#pragma once

#include <array>
#include <vector>

namespace ranslab {

/// Rule on the reference triangle {(0,0),(1,0),(0,1)}; weights sum to 1/2.
struct QuadratureRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Cheapest rule exact for polynomials of total degree `degree`.
QuadratureRule triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1] exact to `degree`; weights sum to 1.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

LineRule gauss_line(int degree);

}  // namespace ranslab
