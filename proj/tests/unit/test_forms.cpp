#include <doctest.h>

#include <functional>
#include <random>

#include "oracles.hpp"
#include "ranslab/error.hpp"
#include "ranslab/formula.hpp"

using namespace ranslab;

namespace {

struct Fixture {
  MeshPtr mesh = std::make_shared<const Mesh>(generate_channel_mesh(3, 4, 1.0, 1.0));
  SpacePtr Q = make_space(mesh, Element{1, ValueShape::Scalar});
  SpacePtr V = make_space(mesh, Element{2, ValueShape::Vector});
  FieldFunction k{Q, "k_"};
  FieldFunction u{V, "u_"};

  Fixture() {
    k.interpolate([](const Point& x) { return std::array<double, 3>{1.0 + x[0] * x[1], 0, 0}; });
    u.interpolate([](const Point& x) { return std::array<double, 3>{x[1] * (2 - x[1]), 0.1 * x[0], 0}; });
  }
};

// Independent shape rule table.
enum class Bin { Sum, Product, Quotient, Power, Inner, Dot };
enum class Un { Grad, Div, Exp, Sqrt, Transpose, Sym, Index };

bool valid(Bin op, int a, int b) {
  switch (op) {
    case Bin::Sum: return a == b;
    case Bin::Product: return a == 0 || b == 0;
    case Bin::Quotient: return b == 0;
    case Bin::Power: return a == 0 && b == 0;
    case Bin::Inner: return a == b;
    case Bin::Dot: return a >= 1 && b >= 1;
  }
  return false;
}

int result_rank(Bin op, int a, int b) {
  switch (op) {
    case Bin::Sum: return a;
    case Bin::Product: return std::max(a, b);
    case Bin::Quotient: return a;
    case Bin::Power: return 0;
    case Bin::Inner: return 0;
    case Bin::Dot: return a + b - 2;
  }
  return -1;
}

bool valid(Un op, int a) {
  switch (op) {
    case Un::Grad: return a <= 1;
    case Un::Div: return a >= 1;
    case Un::Exp:
    case Un::Sqrt: return a == 0;
    case Un::Transpose:
    case Un::Sym: return a == 2;
    case Un::Index: return a >= 1;
  }
  return false;
}

int result_rank(Un op, int a) {
  switch (op) {
    case Un::Grad: return a + 1;
    case Un::Div: return a - 1;
    case Un::Index: return a - 1;
    default: return a;
  }
}

Expr apply(Bin op, const Expr& a, const Expr& b) {
  switch (op) {
    case Bin::Sum: return a + b;
    case Bin::Product: return a * b;
    case Bin::Quotient: return a / b;
    case Bin::Power: return pow(a, b);
    case Bin::Inner: return inner(a, b);
    case Bin::Dot: return dot(a, b);
  }
  return {};
}

Expr apply(Un op, const Expr& a) {
  switch (op) {
    case Un::Grad: return grad(a);
    case Un::Div: return div(a);
    case Un::Exp: return exp(a);
    case Un::Sqrt: return sqrt(a);
    case Un::Transpose: return transpose(a);
    case Un::Sym: return sym(a);
    case Un::Index: return component(a, 1);
  }
  return {};
}

// Random well-shaped expression of the requested rank.
Expr random_expr(std::mt19937& rng, const Fixture& f, int rank, int depth) {
  const Expr k = coefficient(f.k), u = coefficient(f.u);
  const int pick = static_cast<int>(rng() % (depth > 0 ? 4 : 1));
  auto sub = [&](int r) { return random_expr(rng, f, r, depth - 1); };
  if (rank == 0) {
    switch (pick) {
      case 0: return rng() % 2 ? k : constant(0.5 + rng() % 3);
      case 1: return inner(sub(1), sub(1));
      case 2: return exp(sub(0)) * sub(0);
      default: return div(sub(1)) + sub(0);
    }
  }
  if (rank == 1) {
    switch (pick) {
      case 0: return rng() % 2 ? u : grad(k);
      case 1: return dot(sub(2), sub(1));
      case 2: return sub(0) * sub(1);
      default: return div(sub(2)) - sub(1);
    }
  }
  switch (pick) {
    case 0: return rng() % 2 ? grad(u) : identity();
    case 1: return transpose(sub(2)) + sym(sub(2));
    case 2: return sub(0) * sub(2);
    default: return dot(sub(2), sub(2));
  }
}

}  // namespace

TEST_SUITE("forms") {
TEST_CASE("shape checker agrees with the rule table (property)") {
  Fixture f;
  std::mt19937 rng(17);
  int valid_cases = 0, invalid_cases = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int ra = static_cast<int>(rng() % 3), rb = static_cast<int>(rng() % 3);
    const Expr a = random_expr(rng, f, ra, 2), b = random_expr(rng, f, rb, 2);
    REQUIRE(a.rank() == ra);
    REQUIRE(b.rank() == rb);
    if (trial % 2) {
      const auto op = static_cast<Bin>(rng() % 6);
      if (valid(op, ra, rb)) {
        CHECK(apply(op, a, b).rank() == result_rank(op, ra, rb));
        ++valid_cases;
      } else {
        CHECK_THROWS_AS(apply(op, a, b), ShapeError);
        ++invalid_cases;
      }
    } else {
      const auto op = static_cast<Un>(rng() % 7);
      if (valid(op, ra)) {
        CHECK(apply(op, a).rank() == result_rank(op, ra));
        ++valid_cases;
      } else {
        CHECK_THROWS_AS(apply(op, a), ShapeError);
        ++invalid_cases;
      }
    }
    if (ra != 0) CHECK_THROWS_AS(a * dx, ShapeError);
  }
  CHECK(valid_cases >= 100);
  CHECK(invalid_cases >= 100);
}

TEST_CASE("lhs and rhs of the Poisson form") {
  Fixture f;
  const Expr u = trial_function(f.Q), v = test_function(f.Q), kappa = coefficient(f.k);
  const Expr src = constant(3.0) * component(spatial_coordinate(), 0);
  auto [a, L] = lhs_rhs(inner(kappa * grad(u), grad(v)) * dx - src * v * dx);
  CHECK(a.arity() == 2);
  CHECK(L.arity() == 1);
  CHECK(oracle::max_diff(assemble_matrix(a, f.Q, f.Q), assemble_matrix(inner(kappa * grad(u), grad(v)) * dx, f.Q, f.Q)) <= 1e-15);
  CHECK(oracle::max_diff(assemble_vector(L, f.Q), assemble_vector(src * v * dx, f.Q)) <= 1e-15);

  auto [a0, L0] = lhs_rhs(kappa * v * dx);
  CHECK(a0.empty());
  CHECK(oracle::max_diff(assemble_vector(L0, f.Q), assemble_vector(-(kappa * v) * dx, f.Q)) <= 1e-15);
}

TEST_CASE("PSPG term is entirely bilinear") {
  Fixture f;
  auto VQ = mixed_space({f.V, f.Q});
  const Expr u = trial_function(VQ, 0), p = trial_function(VQ, 1), q = test_function(VQ, 1);
  const Expr R = dot(grad(u), coefficient(f.u)) + grad(p);
  auto [a, L] = lhs_rhs(constant(0.1) * inner(R, grad(q)) * dx);
  CHECK(L.empty());
  CHECK(a.integrals.size() >= 1);
}

TEST_CASE("nonlinear trial terms are rejected") {
  Fixture f;
  const Expr u = trial_function(f.Q), v = test_function(f.Q);
  CHECK_THROWS_AS(lhs_rhs(u * u * v * dx), NonlinearityError);
  CHECK_THROWS_AS(lhs_rhs(v / u * dx), NonlinearityError);
}

TEST_CASE("action substitutes the coefficient") {
  Fixture f;
  const Expr u = trial_function(f.Q), v = test_function(f.Q);
  const Form a = inner(grad(u), grad(v)) * dx;
  auto Av = assemble_matrix(a, f.Q, f.Q) * std::span<const double>(f.k.values());
  CHECK(oracle::max_diff(assemble_vector(action(a, f.k), f.Q), Av) <= 1e-14);
  const Form L = coefficient(f.k) * v * dx;
  CHECK(oracle::max_diff(assemble_vector(action(L, f.k), f.Q), assemble_vector(L, f.Q)) == 0.0);
}

TEST_CASE("lhs/rhs round trip equals the action residual (property)") {
  Fixture f;
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> U(0.1, 1.0);
  auto VQ = mixed_space({f.V, f.Q});
  const Expr u = trial_function(VQ, 0), p = trial_function(VQ, 1);
  const Expr v = test_function(VQ, 0), q = test_function(VQ, 1);
  const Expr u_ = coefficient(f.u), nu = constant(0.3), fb = as_vector(constant(1.0), constant(0.0));
  const Form stokes = nu * inner(grad(u), grad(v)) * dx - div(v) * p * dx - q * div(u) * dx - inner(fb, v) * dx;
  const Form ns = inner(dot(grad(u), u_), v) * dx + stokes;
  const Expr s = trial_function(f.Q), w = test_function(f.Q);
  const Form poisson = inner(coefficient(f.k) * grad(s), grad(w)) * dx - constant(2.0) * w * dx;
  for (int trial = 0; trial < 100; ++trial) {
    const bool scalar = trial % 3 == 0;
    const Form& F = scalar ? poisson : (trial % 3 == 1 ? stokes : ns);
    const SpacePtr W = scalar ? f.Q : VQ;
    FieldFunction x(W);
    for (auto& val : x.values()) val = U(rng);
    auto [a, L] = lhs_rhs(F);
    DenseVector r = assemble_matrix(a, W, W) * std::span<const double>(x.values());
    const DenseVector b = assemble_vector(L, W);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    const DenseVector ref = assemble_vector(action(F, x), W);
    CHECK(oracle::max_diff(r, ref) <= 1e-12 * std::max(1.0, norm2(ref)));
  }
}

TEST_CASE("Gateaux derivatives of simple forms") {
  Fixture f;
  const Expr du = trial_function(f.Q), v = test_function(f.Q), w = coefficient(f.k);
  auto J1 = assemble_matrix(gateaux_derivative(w * w * v * dx, f.k), f.Q, f.Q);
  CHECK(oracle::max_diff(J1, assemble_matrix(constant(2.0) * w * du * v * dx, f.Q, f.Q)) <= 1e-14);
  auto J2 = assemble_matrix(gateaux_derivative(inner(grad(w), grad(v)) * dx, f.k), f.Q, f.Q);
  CHECK(oracle::max_diff(J2, assemble_matrix(inner(grad(du), grad(v)) * dx, f.Q, f.Q)) <= 1e-14);
}

TEST_CASE("joint derivative of e^2/k in (k, e)") {
  Fixture f;
  auto KE = mixed_space({f.Q, f.Q});
  FieldFunction ke(KE, "ke");
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> U(0.01, 1.0), D(-1.0, 1.0);
  for (auto& x : ke.values()) x = U(rng);
  auto parts = ke.split();
  const Expr k = coefficient(parts[0]), e = coefficient(parts[1]);
  const Expr v = test_function(KE, 0), dk = trial_function(KE, 0), de = trial_function(KE, 1);
  const Form F = e * e / k * v * dx;
  const Form J = gateaux_derivative(F, ke);
  const Measure dq = dx.with_degree(default_quadrature_degree(e * e / k * v));
  const Form ref = (constant(2.0) * e * de / k - e * e * dk / (k * k)) * v * dq;
  CHECK(oracle::max_diff(assemble_matrix(J, KE, KE), assemble_matrix(ref, KE, KE)) <= 1e-13);
  std::vector<double> d(KE->ndofs());
  for (auto& x : d) x = D(rng);
  CHECK(oracle::jacobian_fd_error(F, ke, d) <= 1e-5);
}

TEST_CASE("golden parse trees") {
  Fixture f;
  FieldFunction e(f.Q, "e_");
  Namespace ns{{"k_", coefficient(f.k)}, {"e_", coefficient(e)}, {"u_", coefficient(f.u)}, {"nu", constant(0.1)}};
  const std::vector<std::pair<std::string, std::string>> golden = {
      {"k_*k_*(1./e_)", "(* (* k_ k_) (/ 1 e_))"},
      {"exp(-3.4/(1. + (k_*k_/nu/e_)/50.)**2)", "(exp (/ -3.4 (** (+ 1 (/ (/ (/ (* k_ k_) 0.1) e_) 50)) 2)))"},
      {"nu/2./k_*inner(grad(k_), grad(k_))", "(* (/ 0.05 k_) (inner (grad k_) (grad k_)))"},
      {"2*-k_", "(* 2 (neg k_))"},
      {"-k_**2", "(neg (** k_ 2))"},
      {"u_[0]", "(index u_ 0)"},
      {"grad(u_)[0,1]", "(index (grad u_) 0 1)"},
      {"1e-3*k_", "(* 0.001 k_)"},
      {"sqrt(abs(k_))", "(sqrt (abs k_))"},
      {"dot(grad(u_), u_)", "(dot (grad u_) u_)"},
      {"k_ - e_ - k_", "(+ (+ k_ (neg e_)) (neg k_))"},
  };
  for (const auto& [text, tree] : golden) CHECK(to_sexpr(parse_formula(text, ns)) == tree);
}

TEST_CASE("formula errors") {
  Fixture f;
  Namespace ns{{"k_", coefficient(f.k)}, {"u_", coefficient(f.u)}};
  CHECK_THROWS_AS(parse_formula("k_ * nut_", ns), NamespaceError);
  CHECK_THROWS_AS(parse_formula("k_ *", ns), ParseError);
  CHECK_THROWS_AS(parse_formula("(k_", ns), ParseError);
  CHECK_THROWS_AS(parse_formula("k_ $ 2", ns), ParseError);
  CHECK_THROWS_AS(parse_formula("inner(k_)", ns), ParseError);
  CHECK_THROWS_AS(parse_formula("foo(k_)", ns), ParseError);
  CHECK_THROWS_AS(parse_formula("k_ + u_", ns), ShapeError);
  CHECK_THROWS_AS(lookup(ns, "e_"), NamespaceError);
}
}
