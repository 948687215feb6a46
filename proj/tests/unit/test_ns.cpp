#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ranslab/channel.hpp"
#include "ranslab/error.hpp"
#include "ranslab/ns_solver.hpp"
#include "ranslab/post.hpp"

using namespace ranslab;

namespace {

MeshPtr channel(int nx, int ny) { return std::make_shared<const Mesh>(generate_channel_mesh(nx, ny, 1.0, 1.0)); }

NSParams cavity(double nu) {
  NSParams prm;
  prm.nu = nu;
  prm.periodic = false;
  prm.noslip_markers = {markers::wall, markers::inlet, markers::outlet};
  prm.symmetry_markers = {};
  prm.velocity_bcs = {{markers::symmetry, [](const Point&) { return std::array<double, 2>{1.0, 0.0}; }}};
  return prm;
}

double poiseuille_error(NSSolver& s, double nu, double f) {
  double err = 0.0;
  const auto& V = *s.V->block(0);
  for (int n = 0; n < V.num_nodes(); ++n) {
    const double y = V.node_coordinates()[n][1];
    const double exact = f / (2 * nu) * y * (2 - y);
    err = std::max({err, std::abs(s.u_[V.dof(n, 0)] - exact), std::abs(s.u_[V.dof(n, 1)])});
  }
  return err;
}

}  // namespace

TEST_SUITE("ns") {
TEST_CASE("Taylor-Hood Poiseuille is exact") {
  auto mesh = channel(4, 8);
  NSParams prm;
  prm.nu = 0.1;
  prm.body_force = {0.3, 0.0};
  NSSolver s(mesh, prm);
  auto info = s.solve(20, 1e-11);
  CHECK(info.converged);
  CHECK(poiseuille_error(s, 0.1, 0.3) < 1e-9);
  const Expr d = div(coefficient(s.u_));
  CHECK(std::sqrt(assemble_scalar(d * d * dx, mesh)) <= 1e-10);
  CHECK(s.wall_friction_velocity() == doctest::Approx(std::sqrt(0.3)).epsilon(1e-10));
  CHECK(s.wall_friction_velocity_gradient() == doctest::Approx(std::sqrt(0.3)).epsilon(1e-10));
}

TEST_CASE("stabilized equal order reproduces Poiseuille at the nodes") {
  NSParams prm;
  prm.nu = 0.1;
  prm.body_force = {0.3, 0.0};
  prm.velocity_degree = 1;
  prm.stabilized = true;
  prm.tau = 0.01;
  NSSolver s(channel(4, 16), prm);
  s.solve(20, 1e-11);
  CHECK(poiseuille_error(s, 0.1, 0.3) < 1e-9);
}

TEST_CASE("configuration errors") {
  auto mesh = channel(2, 2);
  NSParams eq;
  eq.velocity_degree = 1;
  CHECK_THROWS_AS(NSSolver(mesh, eq), ConfigurationError);
  NSParams fi;
  fi.scheme = "Steady_Coupled_3";
  CHECK_THROWS_AS(NSSolver(mesh, fi), ConfigurationError);
  NSParams bad;
  bad.scheme = "Steady_Coupled_9";
  CHECK_THROWS_AS(NSSolver(mesh, bad), LookupError);
  CHECK(ns_scheme_names().size() == 3);
}

TEST_CASE("explicit convection keeps the cached matrix") {
  NSParams prm = cavity(0.1);
  prm.scheme = "Steady_Coupled_2";
  NSSolver s(channel(4, 4), prm);
  CHECK_FALSE(s.scheme().prm.reassemble_lhs);
  s.scheme().step();
  const CSRMatrix A = s.scheme().A;
  s.scheme().step();
  s.scheme().step();
  CHECK(s.scheme().A == A);
  CHECK(s.scheme().assemblies_A() == 1);
}

TEST_CASE("Newton Jacobian adds the lagged-velocity convection block") {
  NSParams prm = cavity(0.05);
  prm.prm.iteration_type = IterationType::Newton;
  NSSolver s(channel(3, 3), prm);
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (auto& x : s.up_.values()) x = U(rng);
  auto [a, L] = lhs_rhs(ns_form(s.ns, Convection::ImplicitLagged, false));
  const Expr du = lookup(s.ns, "u"), v = lookup(s.ns, "v"), u_ = coefficient(s.u_);
  const Measure m = dx.with_degree(default_quadrature_degree(inner(v, dot(grad(u_), u_))));
  auto extra = assemble_matrix(inner(v, dot(grad(u_), du)) * m, s.VQ, s.VQ);
  auto picard = assemble_matrix(a, s.VQ, s.VQ);
  auto J = assemble_matrix(s.scheme().a, s.VQ, s.VQ);
  auto Jd = J.to_dense(), Pd = picard.to_dense(), Ed = extra.to_dense();
  double diff = 0.0;
  for (std::size_t i = 0; i < Jd.size(); ++i)
    for (std::size_t j = 0; j < Jd.size(); ++j) diff = std::max(diff, std::abs(Jd[i][j] - Pd[i][j] - Ed[i][j]));
  CHECK(diff <= 1e-12);
}

TEST_CASE("NS Jacobian matches finite differences") {
  for (bool stabilized : {false, true}) {
    NSParams prm = cavity(0.05);
    prm.prm.iteration_type = IterationType::Newton;
    prm.stabilized = stabilized;
    prm.velocity_degree = stabilized ? 1 : 2;
    prm.tau = 0.01;
    NSSolver s(channel(3, 3), prm);
    std::mt19937 rng(67);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      for (auto& x : s.up_.values()) x = U(rng);
      std::vector<double> d(s.up_.size());
      for (auto& x : d) x = U(rng);
      CHECK(oracle::jacobian_fd_error(s.scheme().a, -s.scheme().L, s.up_, d) <= 1e-5);
    }
  }
}

TEST_CASE("action of the coupled form equals the Picard residual at the same state") {
  NSParams prm = cavity(0.05);
  NSSolver s(channel(3, 3), prm);
  std::mt19937 rng(71);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (auto& x : s.up_.values()) x = U(rng);
  auto [a, L] = lhs_rhs(ns_form(s.ns, Convection::ImplicitLagged, false));
  DenseVector r = assemble_matrix(a, s.VQ, s.VQ) * std::span<const double>(s.up_.values());
  const DenseVector b = assemble_vector(L, s.VQ);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  CHECK(oracle::max_diff(r, s.residual_vector()) <= 1e-12 * norm2(r));
}

TEST_CASE("Picard and Newton agree on the driven cavity") {
  auto mesh = channel(6, 6);
  NSSolver picard(mesh, cavity(0.02));
  auto pi = picard.solve(200, 1e-12);
  REQUIRE(pi.converged);

  NSSolver warm(mesh, cavity(0.02));
  auto wi = warm.solve(200, 1e-3);
  REQUIRE(wi.converged);
  const DenseVector start(warm.up_.values().begin(), warm.up_.values().end());
  auto more = warm.solve(200, 1e-12);
  REQUIRE(more.converged);

  NSParams np = cavity(0.02);
  np.prm.iteration_type = IterationType::Newton;
  NSSolver newton(mesh, np);
  newton.up_.assign(start);
  const auto& V = *newton.V->block(0);
  auto wall = V.marked_dofs(markers::wall);
  auto ni = newton.solve(5, 1e-12, [&](const IterInfo&) {
    for (int d : wall) CHECK(newton.u_[d] == 0.0);
  });
  CHECK(ni.converged);
  CHECK(ni.iter <= 5);
  CHECK(more.iter > ni.iter);
  CHECK(oracle::max_diff(newton.up_.values(), picard.up_.values()) <= 1e-10);
}

TEST_CASE("GMRES with ILU(0) solves the channel Jacobian") {
  // Jacobian at a developed RANS state; at the laminar start ILU(0) is unstable for this Peclet number.
  RunConfig cfg;
  cfg.max_iter = 20;
  ChannelCase cc;
  run_channel(cfg, false, &cc);
  NSParams prm = cc.ns->params();
  prm.prm.iteration_type = IterationType::Newton;
  NSSolver s(cc.mesh, prm);
  s.up_.assign(cc.ns->up_.values());
  s.set_viscosity(constant(prm.nu) + coefficient(cc.turb->nut()));
  auto& sch = s.scheme();
  CSRMatrix J = assemble_matrix(sch.a, s.VQ, s.VQ);
  DenseVector b = assemble_vector(sch.L, s.VQ);
  apply_periodic(J, s.periodic_VQ);
  apply_periodic_newton(b, s.up_.values(), s.periodic_VQ, J);
  apply_dirichlet_newton(J, b, s.up_.values(), s.bcs);
  auto r = gmres(J, DenseVector(b.size(), 0.0), b, Preconditioner::ILU0, 1e-8, 500, 200);
  CHECK(r.converged);
  CHECK(r.iterations <= 500);
  const DenseVector direct = sparse_lu_solve(J, b);
  CHECK(oracle::max_diff(r.x, direct) <= 1e-6 * norm2(direct));
}

TEST_CASE("streamfunction of Taylor-Hood Poiseuille") {
  NSParams prm;
  prm.nu = 0.5;
  prm.body_force = {1.0, 0.0};
  NSSolver s(channel(10, 50), prm);
  s.solve(5, 1e-12);
  auto psi = streamfunction(s.u_);
  // u_x = y (2 - y) gives psi = y^2 - y^3 / 3.
  const Expr y = component(spatial_coordinate(), 1);
  const Expr e = coefficient(psi) - (y * y - y * y * y / constant(3.0));
  CHECK(std::sqrt(assemble_scalar(e * e * dx, s.mesh())) <= 1e-6);
}
}
