#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ranslab/expr.hpp"

namespace ranslab {

enum class MeasureKind { Cell, ExteriorFacet };

struct Measure {
  MeasureKind kind = MeasureKind::Cell;
  int marker = -1;  // -1: every facet
  int degree = -1;  // -1: automatic

  Measure operator()(int m) const { return Measure{kind, m, degree}; }
  Measure with_degree(int d) const { return Measure{kind, marker, d}; }
};

inline const Measure dx{MeasureKind::Cell};
inline const Measure ds{MeasureKind::ExteriorFacet};

struct Integral {
  Expr integrand;
  Measure measure;
};

/// Sum of integrals over cells and exterior facets.
class Form {
 public:
  Form() = default;
  std::vector<Integral> integrals;

  bool empty() const { return integrals.empty(); }
  /// 2 when a trial function appears, 1 with only test functions, else 0.
  int arity() const;
  Form& operator+=(const Form& o);
  Form& operator-=(const Form& o);
};

Form operator*(const Expr& integrand, const Measure& m);
Form operator+(Form a, const Form& b);
Form operator-(Form a, const Form& b);
Form operator-(const Form& a);
Form operator*(double s, const Form& f);

/// Split F = a - L into bilinear and linear parts.
std::pair<Form, Form> lhs_rhs(const Form& F);
/// Replace trial functions by the coefficient w.
Form action(const Form& F, const FieldFunction& w);
/// Directional derivative of F with respect to w in the direction of a trial function on w's space.
/// Integrals are pinned to the quadrature degree F itself would be assembled with.
Form gateaux_derivative(const Form& F, const FieldFunction& w);
Expr gateaux_derivative(const Expr& e, const FieldFunction& w);

/// Lower Grad/Div/Dx of composite expressions onto terminal derivative chains.
Expr expand_derivatives(const Expr& e);
/// Polynomial degree estimate of an integrand (transcendental functions add 2).
int estimate_degree(const Expr& e);
/// Automatic quadrature degree: the estimate capped at `cap`, but at least 2p+1 for argument degree p.
int default_quadrature_degree(const Expr& integrand, int cap = 6);
/// Highest degree of the test/trial arguments present.
int argument_degree(const Expr& e);

/// Map every node bottom-up; `f` returns a null Expr to keep the rebuilt node.
Expr transform(const Expr& e, const std::function<Expr(const Expr&, const std::vector<Expr>&)>& f);

}  // namespace ranslab
