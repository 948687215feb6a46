#pragma once

#include <vector>

#include "ranslab/scheme.hpp"

namespace ranslab {

struct EikonalParams {
  double eps = 0.01;
  int degree = 1;
  int max_iter = 25;
  double max_err = 1e-10;
  double omega = 1.0;
  std::vector<int> wall_markers{markers::wall};
  PeriodicMap periodic;  // empty: natural conditions on every non-wall boundary
};

struct WallDistance {
  FieldFunction y;
  IterInfo info;
  bool converged = false;
};

/// Regularized Eikonal form sqrt(|grad y|^2 + 1e-12) v - f v + eps grad y . grad v.
Form eikonal_form(const Expr& y, const Expr& v, double eps);

/// Wall distance by Newton iteration, started from the Poisson solution of -eps lap y = 1.
WallDistance solve_eikonal(const MeshPtr& mesh, const EikonalParams& prm = {});

}  // namespace ranslab
