#include "ranslab/ns_solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <spdlog/spdlog.h>

#include "ranslab/error.hpp"

namespace ranslab {

namespace {

struct SchemeEntry {
  const char* name;
  Convection convection;
};

constexpr SchemeEntry kSchemes[] = {
    {"Steady_Coupled_1", Convection::ImplicitLagged},
    {"Steady_Coupled_2", Convection::Explicit},
    {"Steady_Coupled_3", Convection::FullyImplicit},
};

double facet_length(const Mesh& m, const Facet& f) {
  const auto& a = m.vertices()[f.vertices[0]];
  const auto& b = m.vertices()[f.vertices[1]];
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

double marker_length(const Mesh& m, int marker) {
  double L = 0.0;
  for (const auto& f : m.facets())
    if (f.marker == marker) L += facet_length(m, f);
  return L;
}

}  // namespace

std::vector<std::string> ns_scheme_names() {
  std::vector<std::string> out;
  for (const auto& s : kSchemes) out.emplace_back(s.name);
  return out;
}

Convection scheme_convection(const std::string& name) {
  for (const auto& s : kSchemes)
    if (name == s.name) return s.convection;
  std::string avail;
  for (const auto& s : kSchemes) avail += std::string(avail.empty() ? "" : ", ") + s.name;
  throw LookupError("unknown Navier-Stokes scheme '" + name + "'; available: " + avail);
}

Expr pspg_tau(const NSParams& prm) {
  if (prm.tau > 0.0) return constant(prm.tau);
  const Expr h = cell_diameter();
  return constant(prm.beta / (4.0 * prm.nu)) * h * h;
}

Form ns_form(const Namespace& ns, Convection conv, bool stabilized) {
  const Expr& u = lookup(ns, "u");
  const Expr& v = lookup(ns, "v");
  const Expr& p = lookup(ns, "p");
  const Expr& q = lookup(ns, "q");
  const Expr& u_ = lookup(ns, "u_");
  const Expr& nu = lookup(ns, "nu");
  const Expr& f = lookup(ns, "f");
  Expr c;
  switch (conv) {
    case Convection::ImplicitLagged: c = dot(grad(u), u_); break;
    case Convection::Explicit: c = dot(grad(u_), u_); break;
    case Convection::FullyImplicit: c = dot(grad(u), u); break;
  }
  const Expr eps = grad(u) + transpose(grad(u));
  Form F = inner(v, c) * dx + nu * inner(grad(v), eps) * dx - inner(v, f) * dx - div(v) * p * dx -
           q * div(u) * dx;
  if (stabilized) {
    const Expr& tau = lookup(ns, "tau");
    Expr R = c + grad(p) - div(nu * eps) - f;
    F -= tau * inner(R, grad(q)) * dx;
  }
  return F;
}

NSSolver::NSSolver(MeshPtr mesh, NSParams prm) : mesh_(std::move(mesh)), prm_(std::move(prm)) {
  if (!(prm_.nu > 0.0)) throw InvalidArgument("viscosity must be positive");
  if (!prm_.stabilized && prm_.velocity_degree <= prm_.pressure_degree)
    throw ConfigurationError("equal-order velocity/pressure needs stabilization");
  scheme_convection(prm_.scheme);
  V = make_space(mesh_, {prm_.velocity_degree, ValueShape::Vector});
  Q = make_space(mesh_, {prm_.pressure_degree, ValueShape::Scalar});
  VQ = mixed_space({V, Q});
  up_ = FieldFunction(VQ, "up");
  u_ = up_.sub(0);
  u_.set_name("u");
  p_ = up_.sub(1);
  p_.set_name("p");

  if (prm_.periodic) {
    auto map = build_periodic_map(*mesh_, markers::inlet, markers::outlet);
    periodic_V = periodic_dofs(V, map);
    periodic_Q = periodic_dofs(Q, map);
    periodic_VQ = periodic_dofs(VQ, map);
  }
  build_bcs();

  const int dq_degree = std::max(1, prm_.velocity_degree - 1);
  auto T = make_space(mesh_, {dq_degree, ValueShape::SymTensor});
  auto S = make_space(mesh_, {dq_degree, ValueShape::Scalar});
  auto periodic_for = [&](const SpacePtr& W) {
    return prm_.periodic ? periodic_dofs(W, build_periodic_map(*mesh_, markers::inlet, markers::outlet))
                         : PeriodicDofs{};
  };
  dq_.emplace_back("Sij_", T, "strain_rate(u_)", DQMode::Project, DQBoundary::None, std::vector<int>{},
                   periodic_for(T));
  dq_.emplace_back("div_u_", S, "div(u_)", DQMode::Project, DQBoundary::None, std::vector<int>{},
                   periodic_for(S));
  g_ = FieldFunction(V, "d2udy2");

  auto uu = trial_functions(VQ);
  auto vv = test_functions(VQ);
  ns["u"] = uu[0];
  ns["p"] = uu[1];
  ns["v"] = vv[0];
  ns["q"] = vv[1];
  ns["u_"] = coefficient(u_);
  ns["p_"] = coefficient(p_);
  ns["nu"] = constant(prm_.nu);
  ns["f"] = as_vector(prm_.body_force[0], prm_.body_force[1]);
  ns["tau"] = pspg_tau(prm_);
  ns["h"] = cell_diameter();
  ns["n"] = facet_normal();
  ns["Sij_"] = coefficient(dq_[0].field());
  ns["div_u_"] = coefficient(dq_[1].field());
  ns["d2udy2_"] = coefficient(g_);
  define();
}

void NSSolver::build_bcs() {
  bcs.clear();
  for (int m : prm_.noslip_markers)
    if (mesh_->has_marker(m)) bcs.emplace_back(VQ, 0, -1, m, 0.0);
  for (int m : prm_.symmetry_markers)
    if (mesh_->has_marker(m)) bcs.emplace_back(VQ, 0, 1, m, 0.0);
  for (const auto& vb : prm_.velocity_bcs)
    for (int c = 0; c < 2; ++c)
      bcs.emplace_back(VQ, 0, c, vb.marker, DirichletBC::ValueFn([f = vb.value, c](const Point& x) {
                         return f(x)[c];
                       }));
  if (prm_.pin_pressure) {
    std::set<int> slaves;
    for (auto [m, s] : periodic_VQ.pairs) slaves.insert(s);
    std::set<int> fixed;
    for (const auto& bc : bcs) fixed.insert(bc.dofs().begin(), bc.dofs().end());
    for (int d = VQ->offset(1); d < VQ->ndofs(); ++d)
      if (!slaves.count(d) && !fixed.count(d)) {
        bcs.push_back(DirichletBC::at_dofs(VQ, {d}, {0.0}));
        break;
      }
  }
}

Form NSSolver::form(const Namespace& n) const {
  return ns_form(n, scheme_convection(prm_.scheme), prm_.stabilized);
}

void NSSolver::define() {
  const Convection conv = scheme_convection(prm_.scheme);
  SchemeParams sp = prm_.prm;
  if (conv == Convection::FullyImplicit && sp.iteration_type == IterationType::Picard)
    throw ConfigurationError(prm_.scheme + " is fully implicit and needs Newton iteration");
  if (conv == Convection::Explicit && sp.iteration_type == IterationType::Picard && lookup(ns, "nu").is_constant())
    sp.reassemble_lhs = false;
  FormMethod method = [this](const Namespace& n) { return form(n); };
  scheme_ = std::make_unique<Scheme>(make_scheme("NS", ns, method, up_, {{"u_", "u"}}, sp, bcs, periodic_VQ));
}

void NSSolver::set_viscosity(const Expr& nu_eff) {
  if (nu_eff.rank() != 0) throw ShapeError("viscosity must be scalar");
  ns["nu"] = nu_eff;
  define();
}

IterInfo NSSolver::solve(int max_iter, double max_err, const std::function<void(const IterInfo&)>& cb) {
  return solve_nonlinear(*scheme_, max_iter, max_err, cb);
}

void NSSolver::update_derived() {
  for (auto& dq : dq_) dq.update(ns);
  if (Mg_.rows() == 0) {
    Mg_ = assemble_matrix(inner(trial_function(V), test_function(V)) * dx, V, V);
    apply_periodic(Mg_, periodic_V);
    lu_g_.factorize(Mg_);
  }
  const Expr v = test_function(V);
  const Expr gu = grad(coefficient(u_));
  auto b = assemble_vector(-inner(gu, grad(v)) * dx + inner(dot(gu, facet_normal()), v) * ds, V);
  apply_periodic(b, periodic_V);
  g_.assign(lu_g_.solve(b));
}

DenseVector NSSolver::residual_vector() {
  Form F = action(form(ns), up_);
  return assemble_vector(F, VQ);
}

double NSSolver::wall_friction_velocity(int marker) {
  auto r = residual_vector();
  double force = 0.0;
  for (int d : V->block(0)->marked_dofs(marker, 0)) force += r[d];
  const double L = marker_length(*mesh_, marker);
  if (L <= 0.0) throw InvalidArgument("marker " + std::to_string(marker) + " has no facets");
  return std::sqrt(std::abs(force) / L);
}

double NSSolver::wall_friction_velocity_gradient(int marker) const {
  const Expr shear = constant(prm_.nu) * component(dot(grad(coefficient(u_)), facet_normal()), 0);
  const double tw = assemble_scalar(shear * ds(marker), mesh_);
  const double L = marker_length(*mesh_, marker);
  if (L <= 0.0) throw InvalidArgument("marker " + std::to_string(marker) + " has no facets");
  return std::sqrt(std::abs(tw) / L);
}

}  // namespace ranslab
