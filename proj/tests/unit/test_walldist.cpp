#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ranslab/walldist.hpp"

using namespace ranslab;

namespace {

MeshPtr channel(int nx, int ny) { return std::make_shared<const Mesh>(generate_channel_mesh(nx, ny, 1.0, 1.0)); }

double oracle_error(const WallDistance& wd, double eps) {
  const auto& X = wd.y.space()->block(0)->node_coordinates();
  double err = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) err = std::max(err, std::abs(wd.y[i] - oracle::eikonal_1d(X[i][1], 1.0, eps)));
  return err;
}

}  // namespace

TEST_SUITE("walldist") {
TEST_CASE("wall dofs are exactly zero and y is nonnegative") {
  auto wd = solve_eikonal(channel(4, 20));
  CHECK(wd.converged);
  const auto& V = *wd.y.space()->block(0);
  for (int d : V.marked_dofs(markers::wall)) CHECK(wd.y[d] == 0.0);
  for (double v : wd.y.values()) CHECK(v >= 0.0);
}

TEST_CASE("channel distance matches the 1D regularized profile") {
  auto wd = solve_eikonal(channel(10, 50));
  REQUIRE(wd.converged);
  CHECK(oracle_error(wd, 0.01) <= 0.05);
}

TEST_CASE("gradient norm stays near one away from the boundaries") {
  auto wd = solve_eikonal(channel(10, 50));
  const double h = 1.0 / 50;
  int checked = 0;
  for (auto [yc, g] : oracle::p1_cell_gradients(wd.y)) {
    if (yc < 3 * h || yc > 1.0 - 3 * h) continue;
    CHECK(g >= 0.8);
    CHECK(g <= 1.05);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("error against the exact distance shrinks with eps") {
  auto mesh = channel(4, 100);
  double prev = INFINITY;
  for (double eps : {0.04, 0.02, 0.01}) {
    EikonalParams prm;
    prm.eps = eps;
    auto wd = solve_eikonal(mesh, prm);
    REQUIRE(wd.converged);
    const auto& X = wd.y.space()->block(0)->node_coordinates();
    double err = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) err = std::max(err, std::abs(wd.y[i] - X[i][1]));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("Eikonal Jacobian matches finite differences") {
  auto mesh = channel(3, 6);
  auto V = make_space(mesh, Element{1, ValueShape::Scalar});
  FieldFunction y(V, "y");
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-0.2, 0.2);
  for (int trial = 0; trial < 5; ++trial) {
    y.interpolate([&](const Point& x) { return std::array<double, 3>{x[1] * (1.5 + U(rng)) + 0.3 * x[0], 0, 0}; });
    std::vector<double> d(V->ndofs());
    for (auto& v : d) v = U(rng);
    const Form F = eikonal_form(coefficient(y), test_function(V), 0.01);
    CHECK(oracle::jacobian_fd_error(F, y, d) <= 1e-5);
  }
}
}
