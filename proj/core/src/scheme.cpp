#include "ranslab/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <spdlog/spdlog.h>

#include "ranslab/error.hpp"

namespace ranslab {

IterationType parse_iteration_type(const std::string& s) {
  if (s == "Picard") return IterationType::Picard;
  if (s == "Newton") return IterationType::Newton;
  throw ConfigurationError("unknown iteration type '" + s + "' (expected Picard or Newton)");
}

LinearSolverKind parse_linear_solver(const std::string& s) {
  if (s == "direct") return LinearSolverKind::Direct;
  if (s == "gmres") return LinearSolverKind::Gmres;
  throw ConfigurationError("unknown linear solver '" + s + "' (expected direct or gmres)");
}

Scheme::Scheme(std::string name_, Form a_, Form L_, FieldFunction x_, std::vector<DirichletBC> bcs_,
               PeriodicDofs periodic_, SchemeParams prm_)
    : name(std::move(name_)),
      a(std::move(a_)),
      L(std::move(L_)),
      x(std::move(x_)),
      bcs(std::move(bcs_)),
      periodic(std::move(periodic_)),
      prm(std::move(prm_)) {
  if (!x.valid()) throw InvalidArgument("scheme '" + name + "' needs a solution field");
}

DenseVector Scheme::linear_solve(const DenseVector& rhs, const DenseVector& start) {
  try {
    DenseVector sol;
    if (prm.linear_solver == LinearSolverKind::Direct) {
      if (!lu_current_) {
        lu_.factorize(A);
        lu_current_ = true;
      }
      sol = lu_.solve(rhs);
    } else {
      auto r = gmres(A, start, rhs, Preconditioner::ILU0, prm.gmres_rtol, prm.gmres_maxit, prm.gmres_restart);
      if (!r.converged)
        spdlog::warn("scheme '{}': GMRES stopped after {} iterations (relative residual {:.3e})", name, r.iterations,
                     r.relative_residual);
      sol = std::move(r.x);
    }
    // Identity rows: take the constrained values verbatim instead of the factorization round-off.
    for (const auto& bc : bcs)
      for (int d : bc.dofs()) sol[d] = rhs[d];
    return sol;
  } catch (const SingularMatrix& e) {
    throw SolverError("scheme '" + name + "': " + e.what());
  }
}

StepResult Scheme::picard_step(bool assemble_A, bool assemble_b) {
  const auto& S = space();
  if (assemble_A || !have_A_) {
    A = assemble_matrix(a, S, S, prm.assembly);
    apply_periodic(A, periodic);
    apply_dirichlet(A, bcs);
    have_A_ = true;
    lu_current_ = false;
    ++assemblies_A_;
    if (!prm.matrix_market_path.empty()) {
      std::ofstream out(prm.matrix_market_path);
      write_matrix_market(A, out);
    }
  }
  if (assemble_b || !have_b_) {
    b = L.empty() ? DenseVector(S->ndofs(), 0.0) : assemble_vector(L, S, prm.assembly);
    apply_periodic(b, periodic);
    apply_dirichlet(b, bcs);
    have_b_ = true;
  }
  DenseVector x_old(x.values().begin(), x.values().end());
  DenseVector x_star = linear_solve(b, x_old);
  StepResult r;
  r.dx = std::move(x_star);
  axpy(r.dx, -1.0, x_old);
  axpy(x.values(), prm.omega, r.dx);
  if (update_hook) update_hook();
  r.residual = residual(A, x.values(), b);
  return r;
}

StepResult Scheme::newton_step() {
  const auto& S = space();
  A = assemble_matrix(a, S, S, prm.assembly);
  b = L.empty() ? DenseVector(S->ndofs(), 0.0) : assemble_vector(L, S, prm.assembly);
  apply_periodic(A, periodic);
  apply_periodic_newton(b, x.values(), periodic, A);
  apply_dirichlet_newton(A, b, x.values(), bcs);
  have_A_ = have_b_ = true;
  lu_current_ = false;
  ++assemblies_A_;
  StepResult r;
  r.residual = norm2(b);
  r.dx = linear_solve(b, DenseVector(b.size(), 0.0));
  axpy(x.values(), prm.omega, r.dx);
  if (update_hook) update_hook();
  return r;
}

StepResult Scheme::step() {
  if (prm.iteration_type == IterationType::Newton) return newton_step();
  return picard_step(prm.reassemble_lhs, prm.reassemble_rhs);
}

IterInfo solve_nonlinear(Scheme& scheme, int max_iter, double max_err,
                         const std::function<void(const IterInfo&)>& update) {
  IterInfo info;
  double err = 1e10;
  while (err > max_err && info.iter < max_iter) {
    auto r = scheme.step();
    ++info.iter;
    info.residual = r.residual;
    info.correction = norm2(r.dx);
    err = info.error();
    spdlog::debug("{} iter {}: residual {:.3e} correction {:.3e}", scheme.name, info.iter, info.residual,
                  info.correction);
    if (update) update(info);
  }
  info.converged = info.iter > 0 && err <= max_err;
  return info;
}

void positivity_clamp(std::span<double> x, double floor) {
  for (double& v : x)
    if (v < floor || std::isnan(v)) v = floor;
}

Scheme make_scheme(std::string name, const Namespace& ns, const FormMethod& method, const FieldFunction& unknown,
                   const std::vector<std::pair<std::string, std::string>>& lagged_to_trial, SchemeParams prm,
                   std::vector<DirichletBC> bcs, PeriodicDofs periodic) {
  Form a, L;
  if (prm.iteration_type == IterationType::Picard) {
    std::tie(a, L) = lhs_rhs(method(ns));
  } else {
    Namespace sub = ns;
    for (const auto& [lagged, trial] : lagged_to_trial) {
      auto it = ns.find(trial);
      if (it == ns.end()) throw NamespaceError("name '" + trial + "' is not defined in the namespace");
      sub[lagged] = it->second;
    }
    Form F = action(method(sub), unknown);
    a = gateaux_derivative(F, unknown);
    L = -F;
  }
  return Scheme(std::move(name), std::move(a), std::move(L), unknown, std::move(bcs), std::move(periodic),
                std::move(prm));
}

}  // namespace ranslab
