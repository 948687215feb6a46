#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ranslab/error.hpp"

using namespace ranslab;

namespace {

MeshPtr reference_triangle() {
  return std::make_shared<const Mesh>(
      Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 0}, 1}}));
}

MeshPtr channel(int nx, int ny) { return std::make_shared<const Mesh>(generate_channel_mesh(nx, ny, 1.0, 1.0)); }

Eigen::MatrixXd dense(const CSRMatrix& A) {
  Eigen::MatrixXd M(A.rows(), A.cols());
  auto d = A.to_dense();
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) M(i, j) = d[i][j];
  return M;
}

}  // namespace

TEST_SUITE("assembly") {
TEST_CASE("reference element matrices") {
  auto V = make_space(reference_triangle(), Element{1, ValueShape::Scalar});
  const Expr u = trial_function(V), v = test_function(V);
  auto M = assemble_matrix(u * v * dx, V, V).to_dense();
  auto K = assemble_matrix(inner(grad(u), grad(v)) * dx, V, V).to_dense();
  const double m[3][3] = {{2, 1, 1}, {1, 2, 1}, {1, 1, 2}};
  const double k[3][3] = {{2, -1, -1}, {-1, 1, 0}, {-1, 0, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(M[i][j] == doctest::Approx(m[i][j] / 24.0).epsilon(1e-14));
      CHECK(K[i][j] == doctest::Approx(k[i][j] / 2.0).epsilon(1e-14));
    }
  auto Z = assemble_matrix(constant(0.0) * u * v * dx, V, V);
  for (double x : Z.values()) CHECK(x == 0.0);
}

TEST_CASE("scalar integrals") {
  auto mesh = channel(4, 3);
  const Expr x = spatial_coordinate();
  CHECK(assemble_scalar(constant(1.0) * dx, mesh) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(assemble_scalar(component(x, 0) * component(x, 1) * dx, mesh) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(assemble_scalar(constant(1.0) * ds(markers::wall), mesh) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(assemble_scalar(constant(1.0) * ds, mesh) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(assemble_scalar(component(facet_normal(), 1) * ds(markers::wall), mesh) == doctest::Approx(-1.0));
  CHECK(assemble_scalar(component(facet_normal(), 0) * ds(markers::outlet), mesh) == doctest::Approx(1.0));
}

TEST_CASE("Poisson stiffness is symmetric semi-definite, definite once constrained") {
  auto mesh = channel(3, 3);
  for (int p : {1, 2}) {
    auto V = make_space(mesh, Element{p, ValueShape::Scalar});
    const Expr u = trial_function(V), v = test_function(V);
    auto K = dense(assemble_matrix(inner(grad(u), grad(v)) * dx, V, V));
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    Eigen::MatrixXd Kc = K;
    Kc.row(0).setZero();
    Kc.col(0).setZero();
    Kc(0, 0) = 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(Kc);
    CHECK(ec.eigenvalues().minCoeff() > 1e-8);
  }
}

TEST_CASE("Stokes operator is symmetric") {
  auto mesh = channel(2, 3);
  auto VQ = mixed_space({make_space(mesh, Element{2, ValueShape::Vector}), make_space(mesh, Element{1, ValueShape::Scalar})});
  const Expr u = trial_function(VQ, 0), p = trial_function(VQ, 1), v = test_function(VQ, 0), q = test_function(VQ, 1);
  auto A = dense(assemble_matrix(inner(grad(u), grad(v)) * dx - div(v) * p * dx - q * div(u) * dx, VQ, VQ));
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("Dirichlet rows") {
  CSRMatrix A = CSRMatrix::from_triplets(2, 2, {{0, 0, 4}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}});
  DenseVector b{1, 1};
  auto mesh = channel(1, 1);
  auto V = make_space(mesh, Element{1, ValueShape::Scalar});
  apply_dirichlet(A, b, {DirichletBC::at_dofs(V, {0}, {2.0})});
  CHECK(A.get(0, 0) == 1.0);
  CHECK(A.get(0, 1) == 0.0);
  CHECK(A.get(1, 0) == 1.0);
  CHECK(b[0] == 2.0);
  CHECK(b[1] == 1.0);
}

TEST_CASE("Poisson with a wall condition vanishes on the wall") {
  auto mesh = channel(4, 6);
  auto V = make_space(mesh, Element{2, ValueShape::Scalar});
  const Expr u = trial_function(V), v = test_function(V);
  auto A = assemble_matrix(inner(grad(u), grad(v)) * dx, V, V);
  auto b = assemble_vector(v * dx, V);
  apply_dirichlet(A, b, {DirichletBC(V, 0, -1, markers::wall, 0.0)});
  auto x = sparse_lu_solve(A, b);
  for (int d : V->block(0)->marked_dofs(markers::wall)) CHECK(std::abs(x[d]) <= 1e-15);
  // 1D profile y - y^2/2 is quadratic, so P2 reproduces it.
  const auto& X = V->block(0)->node_coordinates();
  for (std::size_t i = 0; i < X.size(); ++i) CHECK(x[i] == doctest::Approx(X[i][1] - 0.5 * X[i][1] * X[i][1]).epsilon(1e-12));
}

TEST_CASE("inflow profile is reproduced at the inlet dofs") {
  auto mesh = channel(3, 5);
  auto V = make_space(mesh, Element{2, ValueShape::Vector});
  DirichletBC bc(V, 0, 0, markers::inlet, DirichletBC::ValueFn([](const Point& x) { return x[1] * (2 - x[1]); }));
  const Expr u = trial_function(V), v = test_function(V);
  auto A = assemble_matrix(inner(grad(u), grad(v)) * dx, V, V);
  DenseVector b(V->ndofs(), 0.0);
  apply_dirichlet(A, b, {bc});
  auto x = sparse_lu_solve(A, b);
  const auto& X = V->block(0)->node_coordinates();
  for (int d : V->block(0)->marked_dofs(markers::inlet, 0)) {
    const double y = X[d / 2][1];
    CHECK(std::abs(x[d] - y * (2 - y)) <= 1e-14);
  }
}

TEST_CASE("Newton Dirichlet correction") {
  CSRMatrix A = CSRMatrix::from_triplets(2, 2, {{0, 0, 2}, {0, 1, 1}, {1, 0, 1}, {1, 1, 2}});
  auto V = make_space(channel(1, 1), Element{1, ValueShape::Scalar});
  auto bc = DirichletBC::at_dofs(V, {1}, {3.0});
  std::vector<double> x{0.0, 3.0};
  DenseVector b{1.0, 5.0};
  apply_dirichlet_newton(A, b, x, {bc});
  CHECK(b[1] == 0.0);
  x[1] = 2.5;
  b = {1.0, 5.0};
  apply_dirichlet_newton(b, x, {bc});
  CHECK(b[1] == 0.5);
  CHECK(x[1] + b[1] == 3.0);
}

TEST_CASE("periodic folding") {
  // Two dofs coupled only by the periodic constraint end up equal.
  CSRMatrix A = CSRMatrix::from_triplets(2, 2, {{0, 0, 2}, {1, 1, 1}});
  DenseVector b{1.0, 2.0};
  apply_periodic(A, b, PeriodicDofs{{{0, 1}}});
  auto x = sparse_lu_solve(A, b);
  CHECK(x[0] == doctest::Approx(x[1]));
  CHECK(x[0] == doctest::Approx(1.0));

  auto mesh = channel(4, 6);
  auto V = make_space(mesh, Element{1, ValueShape::Scalar});
  const Expr u = trial_function(V), v = test_function(V);
  auto K = assemble_matrix(inner(grad(u), grad(v)) * dx, V, V);
  auto pd = periodic_dofs(V, build_periodic_map(*mesh, markers::inlet, markers::outlet));
  CHECK(pd.pairs.size() == 7);
  auto Kp = K;
  apply_periodic(Kp, pd);
  auto D = dense(Kp);
  CHECK((D - D.transpose()).cwiseAbs().maxCoeff() <= 1e-14);

  // Linear-in-y solution with periodic x: u = 0 on the wall, du/dn = 1 on the symmetry plane.
  auto b2 = assemble_vector(v * ds(markers::symmetry), V);
  apply_periodic(K, b2, pd);
  apply_dirichlet(K, b2, {DirichletBC(V, 0, -1, markers::wall, 0.0)});
  auto y = sparse_lu_solve(K, b2);
  const auto& X = V->block(0)->node_coordinates();
  for (std::size_t i = 0; i < X.size(); ++i) CHECK(std::abs(y[i] - X[i][1]) <= 1e-12);
}

TEST_CASE("assembly errors") {
  auto mesh = channel(1, 1);
  auto V = make_space(mesh, Element{1, ValueShape::Scalar});
  const Expr u = trial_function(V), v = test_function(V);
  CHECK_THROWS_AS(assemble_vector(u * v * dx, V), AssemblyError);
  CHECK_THROWS_AS(assemble_matrix(v * dx, V, V), AssemblyError);
  CHECK_THROWS_AS(DirichletBC::at_dofs(V, {99}, {0.0}), InvalidArgument);
}
}
