#include "ranslab/walldist.hpp"

#include <spdlog/spdlog.h>

#include "ranslab/error.hpp"

namespace ranslab {

Form eikonal_form(const Expr& y, const Expr& v, double eps) {
  return sqrt(inner(grad(y), grad(y)) + 1e-12) * v * dx - v * dx + constant(eps) * inner(grad(y), grad(v)) * dx;
}

WallDistance solve_eikonal(const MeshPtr& mesh, const EikonalParams& prm) {
  if (!(prm.eps > 0.0)) throw InvalidArgument("Eikonal regularization must be positive");
  auto V = make_space(mesh, {prm.degree, ValueShape::Scalar});
  std::vector<DirichletBC> bcs;
  for (int m : prm.wall_markers)
    if (mesh->has_marker(m)) bcs.emplace_back(V, 0, -1, m, 0.0);
  if (bcs.empty()) throw InvalidArgument("Eikonal solve needs at least one wall facet");
  const PeriodicDofs periodic = prm.periodic.pairs.empty() ? PeriodicDofs{} : periodic_dofs(V, prm.periodic);

  WallDistance out;
  out.y = FieldFunction(V, "y");
  const Expr u = trial_function(V);
  const Expr v = test_function(V);

  auto A = assemble_matrix(constant(prm.eps) * inner(grad(u), grad(v)) * dx, V, V);
  auto b = assemble_vector(v * dx, V);
  apply_periodic(A, b, periodic);
  apply_dirichlet(A, b, bcs);
  out.y.assign(sparse_lu_solve(A, b));

  SchemeParams sp;
  sp.iteration_type = IterationType::Newton;
  sp.omega = prm.omega;
  Namespace ns{{"y", u}, {"v", v}};
  FormMethod method = [&](const Namespace& n) { return eikonal_form(lookup(n, "y"), lookup(n, "v"), prm.eps); };
  Scheme s = make_scheme("Eikonal", ns, method, out.y, {}, sp, bcs, periodic);
  out.info = solve_nonlinear(s, prm.max_iter, prm.max_err);
  out.converged = out.info.converged;
  if (!out.converged)
    spdlog::warn("Eikonal Newton iteration stopped after {} iterations (error {:.3e})", out.info.iter,
                 out.info.error());
  return out;
}

}  // namespace ranslab
