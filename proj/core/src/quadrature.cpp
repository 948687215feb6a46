#include "ranslab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "ranslab/error.hpp"

namespace ranslab {

namespace {

void add_orbit3(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({a, a});
  r.points.push_back({b, a});
  r.points.push_back({a, b});
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

void add_orbit6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  const double p[6][2] = {{a, b}, {b, a}, {a, c}, {c, a}, {b, c}, {c, b}};
  for (const auto& q : p) {
    r.points.push_back({q[0], q[1]});
    r.weights.push_back(w);
  }
}

void normalize(QuadratureRule& r) {
  double s = 0.0;
  for (double w : r.weights) s += w;
  for (double& w : r.weights) w *= 0.5 / s;
}

// Collapsed tensor Gauss rule for arbitrary degree.
QuadratureRule duffy_rule(int degree) {
  const auto g = gauss_line(degree + 1);
  QuadratureRule r;
  r.degree = degree;
  for (std::size_t i = 0; i < g.points.size(); ++i)
    for (std::size_t j = 0; j < g.points.size(); ++j) {
      const double u = g.points[i], v = g.points[j];
      r.points.push_back({u, v * (1.0 - u)});
      r.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  return r;
}

}  // namespace

LineRule gauss_line(int degree) {
  if (degree < 0) throw InvalidArgument("quadrature degree must be non-negative");
  const int n = degree / 2 + 1;
  LineRule r;
  r.points.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.points[i] = 0.5 * (1.0 - x);
    r.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

QuadratureRule triangle_rule(int degree) {
  if (degree < 0) throw InvalidArgument("quadrature degree must be non-negative");
  QuadratureRule r;
  if (degree <= 1) {
    r.points = {{1.0 / 3.0, 1.0 / 3.0}};
    r.weights = {1.0};
    r.degree = 1;
  } else if (degree == 2) {
    add_orbit3(r, 1.0 / 6.0, 1.0);
    r.degree = 2;
  } else if (degree <= 4) {
    add_orbit3(r, 0.445948490915965, 0.223381589678011);
    add_orbit3(r, 0.091576213509771, 0.109951743655322);
    r.degree = 4;
  } else if (degree == 5) {
    r.points = {{1.0 / 3.0, 1.0 / 3.0}};
    r.weights = {0.225};
    add_orbit3(r, 0.470142064105115, 0.132394152788506);
    add_orbit3(r, 0.101286507323456, 0.125939180544827);
    r.degree = 5;
  } else if (degree == 6) {
    add_orbit3(r, 0.249286745170910, 0.116786275726379);
    add_orbit3(r, 0.063089014491502, 0.050844906370207);
    add_orbit6(r, 0.053145049844817, 0.310352451033784, 0.082851075618374);
    r.degree = 6;
  } else {
    return duffy_rule(degree);
  }
  normalize(r);
  return r;
}

}  // namespace ranslab
