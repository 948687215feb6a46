#include "ranslab/expr.hpp"

#include <charconv>
#include <cmath>
#include <unordered_set>

#include "ranslab/error.hpp"

namespace ranslab {

const char* op_name(Op op) {
  switch (op) {
    case Op::Zero: return "zero";
    case Op::Constant: return "const";
    case Op::Identity: return "I";
    case Op::SpatialCoordinate: return "x";
    case Op::FacetNormal: return "n";
    case Op::CellDiameter: return "h";
    case Op::Test: return "test";
    case Op::Trial: return "trial";
    case Op::Coefficient: return "coef";
    case Op::Grad: return "grad";
    case Op::Div: return "div";
    case Op::Dx: return "dx";
    case Op::Transpose: return "transpose";
    case Op::Index: return "index";
    case Op::ListVector: return "vector";
    case Op::ListTensor: return "matrix";
    case Op::Sum: return "+";
    case Op::Negate: return "neg";
    case Op::Product: return "*";
    case Op::Quotient: return "/";
    case Op::Power: return "**";
    case Op::Inner: return "inner";
    case Op::Dot: return "dot";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    case Op::Sign: return "sign";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
  }
  return "?";
}

namespace {

Expr make(Op op, int rank, std::vector<Expr> ch = {}, std::array<int, 2> idx = {-1, -1}) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->rank = rank;
  n->idx = idx;
  for (const auto& c : ch) {
    n->has_test = n->has_test || c.has_test();
    n->has_trial = n->has_trial || c.has_trial();
  }
  n->children = std::move(ch);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

std::string shape_name(int rank) { return rank == 0 ? "scalar" : rank == 1 ? "vector" : "tensor"; }

[[noreturn]] void shape_error(const std::string& what, const Expr& a, const Expr& b) {
  throw ShapeError(what + ": incompatible shapes " + shape_name(a.rank()) + " and " + shape_name(b.rank()));
}

void require_scalar(const char* what, const Expr& a) {
  if (a.rank() != 0) throw ShapeError(std::string(what) + " needs a scalar argument, got " + shape_name(a.rank()));
}

bool is_one(const Expr& e) { return e.op() == Op::Constant && e.constant_value() == 1.0; }

// Nodes whose spatial derivative vanishes identically.
bool piecewise_constant(const Expr& e) {
  switch (e.op()) {
    case Op::Zero:
    case Op::Constant:
    case Op::Identity:
    case Op::FacetNormal:
    case Op::CellDiameter: return true;
    default: return false;
  }
}

Expr unary(Op op, const Expr& a, double (*f)(double)) {
  require_scalar(op_name(op), a);
  if (a.is_constant()) return constant(f(a.constant_value()));
  return make(op, 0, {a});
}

double sign_fn(double x) { return x > 0.0 ? 1.0 : x < 0.0 ? -1.0 : 0.0; }

}  // namespace

Expr::Expr(double c) : Expr(constant(c)) {}

Expr Expr::operator[](int i) const { return component(*this, i); }
Expr Expr::T() const { return transpose(*this); }

Expr zero(int rank) {
  if (rank < 0 || rank > 2) throw ShapeError("rank out of range");
  return make(Op::Zero, rank);
}

Expr constant(double v) {
  if (v == 0.0) return zero(0);
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->value = v;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr identity() { return make(Op::Identity, 2); }
Expr spatial_coordinate() { return make(Op::SpatialCoordinate, 1); }
Expr facet_normal() { return make(Op::FacetNormal, 1); }
Expr cell_diameter() { return make(Op::CellDiameter, 0); }

namespace {
Expr argument(Op op, const SpacePtr& space, int block) {
  if (!space) throw InvalidArgument("argument needs a space");
  if (block < 0 || block >= space->num_blocks()) throw InvalidArgument("argument block out of range");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->rank = space->block(block)->element().rank();
  n->space = space;
  n->block = block;
  n->has_test = op == Op::Test;
  n->has_trial = op == Op::Trial;
  n->name = std::string(op == Op::Test ? "v" : "u") + std::to_string(block);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}
}  // namespace

Expr test_function(const SpacePtr& space, int block) { return argument(Op::Test, space, block); }
Expr trial_function(const SpacePtr& space, int block) { return argument(Op::Trial, space, block); }

std::vector<Expr> test_functions(const SpacePtr& space) {
  std::vector<Expr> out;
  for (int b = 0; b < space->num_blocks(); ++b) out.push_back(test_function(space, b));
  return out;
}

std::vector<Expr> trial_functions(const SpacePtr& space) {
  std::vector<Expr> out;
  for (int b = 0; b < space->num_blocks(); ++b) out.push_back(trial_function(space, b));
  return out;
}

Expr coefficient(const FieldFunction& f) {
  if (!f.valid()) throw InvalidArgument("coefficient needs a field");
  if (f.space()->num_blocks() != 1) throw InvalidArgument("coefficient needs a one-block field; split it first");
  auto n = std::make_shared<Node>();
  n->op = Op::Coefficient;
  n->rank = f.space()->block(0)->element().rank();
  n->field = f;
  n->name = f.name().empty() ? "w" : f.name();
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.rank() != b.rank()) shape_error("sum", a, b);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant()) return constant(a.constant_value() + b.constant_value());
  return make(Op::Sum, a.rank(), {a, b});
}

Expr operator-(const Expr& a) {
  if (a.is_zero()) return a;
  if (a.is_constant()) return constant(-a.constant_value());
  if (a.op() == Op::Negate) return a(0);
  return make(Op::Negate, a.rank(), {a});
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.rank() > 0 && b.rank() > 0) shape_error("product", a, b);
  const int r = std::max(a.rank(), b.rank());
  if (a.is_zero() || b.is_zero()) return zero(r);
  if (a.is_constant() && b.is_constant()) return constant(a.constant_value() * b.constant_value());
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return make(Op::Product, r, {a, b});
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.rank() != 0) shape_error("quotient", a, b);
  if (a.is_zero()) return a;
  if (is_one(b)) return a;
  if (a.is_constant() && b.op() == Op::Constant) return constant(a.constant_value() / b.constant_value());
  return make(Op::Quotient, a.rank(), {a, b});
}

Expr pow(const Expr& a, const Expr& b) {
  if (a.rank() != 0 || b.rank() != 0) shape_error("power", a, b);
  if (b.is_zero()) return constant(1.0);
  if (is_one(b)) return a;
  if (a.is_constant() && b.is_constant()) return constant(std::pow(a.constant_value(), b.constant_value()));
  if (a.is_zero() && b.op() == Op::Constant && b.constant_value() > 0.0) return zero(0);
  return make(Op::Power, 0, {a, b});
}

Expr grad(const Expr& a) {
  if (a.rank() > 1) throw ShapeError("grad of a tensor exceeds the supported rank");
  if (piecewise_constant(a)) return zero(a.rank() + 1);
  return make(Op::Grad, a.rank() + 1, {a});
}

Expr div(const Expr& a) {
  if (a.rank() < 1) throw ShapeError("div needs a vector or tensor argument");
  if (piecewise_constant(a)) return zero(a.rank() - 1);
  return make(Op::Div, a.rank() - 1, {a});
}

Expr Dx(const Expr& a, int d) {
  if (d < 0 || d > 1) throw ShapeError("derivative direction out of range");
  if (piecewise_constant(a)) return zero(a.rank());
  return make(Op::Dx, a.rank(), {a}, {d, -1});
}

Expr transpose(const Expr& a) {
  if (a.rank() != 2) throw ShapeError("transpose needs a tensor argument");
  if (a.is_zero() || a.op() == Op::Identity) return a;
  if (a.op() == Op::Transpose) return a(0);
  return make(Op::Transpose, 2, {a});
}

Expr inner(const Expr& a, const Expr& b) {
  if (a.rank() != b.rank()) shape_error("inner", a, b);
  if (a.rank() == 0) return a * b;
  if (a.is_zero() || b.is_zero()) return zero(0);
  return make(Op::Inner, 0, {a, b});
}

Expr dot(const Expr& a, const Expr& b) {
  if (a.rank() < 1 || b.rank() < 1) shape_error("dot", a, b);
  const int r = a.rank() + b.rank() - 2;
  if (a.is_zero() || b.is_zero()) return zero(r);
  if (a.op() == Op::Identity) return b;
  if (b.op() == Op::Identity) return a;
  return make(Op::Dot, r, {a, b});
}

Expr exp(const Expr& a) { return unary(Op::Exp, a, [](double x) { return std::exp(x); }); }
Expr ln(const Expr& a) {
  require_scalar("log", a);
  if (a.op() == Op::Constant) return constant(std::log(a.constant_value()));
  return make(Op::Log, 0, {a});
}
Expr sqrt(const Expr& a) { return unary(Op::Sqrt, a, [](double x) { return std::sqrt(x); }); }
Expr abs(const Expr& a) { return unary(Op::Abs, a, [](double x) { return std::abs(x); }); }
Expr sign(const Expr& a) { return unary(Op::Sign, a, sign_fn); }
Expr sin(const Expr& a) { return unary(Op::Sin, a, [](double x) { return std::sin(x); }); }
Expr cos(const Expr& a) { return unary(Op::Cos, a, [](double x) { return std::cos(x); }); }

Expr sym(const Expr& a) {
  if (a.rank() != 2) throw ShapeError("sym needs a tensor argument");
  return constant(0.5) * (a + transpose(a));
}

Expr component(const Expr& a, int i) {
  if (a.rank() < 1) throw ShapeError("cannot index a scalar");
  if (i < 0 || i > 1) throw ShapeError("component index out of range");
  if (a.is_zero()) return zero(a.rank() - 1);
  if (a.op() == Op::ListVector) return a(i);
  if (a.op() == Op::ListTensor) return as_vector(a(2 * i), a(2 * i + 1));
  return make(Op::Index, a.rank() - 1, {a}, {i, -1});
}

Expr component(const Expr& a, int i, int j) {
  if (a.rank() != 2) throw ShapeError("double index needs a tensor");
  if (i < 0 || i > 1 || j < 0 || j > 1) throw ShapeError("component index out of range");
  if (a.is_zero()) return zero(0);
  if (a.op() == Op::ListTensor) return a(2 * i + j);
  if (a.op() == Op::Identity) return constant(i == j ? 1.0 : 0.0);
  if (a.op() == Op::Transpose) return component(a(0), j, i);
  return make(Op::Index, 0, {a}, {i, j});
}

Expr as_vector(const Expr& a, const Expr& b) {
  require_scalar("vector component", a);
  require_scalar("vector component", b);
  if (a.is_zero() && b.is_zero()) return zero(1);
  return make(Op::ListVector, 1, {a, b});
}

Expr as_matrix(const Expr& a00, const Expr& a01, const Expr& a10, const Expr& a11) {
  for (const auto* e : {&a00, &a01, &a10, &a11}) require_scalar("matrix component", *e);
  if (a00.is_zero() && a01.is_zero() && a10.is_zero() && a11.is_zero()) return zero(2);
  return make(Op::ListTensor, 2, {a00, a01, a10, a11});
}

Expr rebuild(const Expr& e, std::vector<Expr> c) {
  switch (e.op()) {
    case Op::Zero:
    case Op::Constant:
    case Op::Identity:
    case Op::SpatialCoordinate:
    case Op::FacetNormal:
    case Op::CellDiameter:
    case Op::Test:
    case Op::Trial:
    case Op::Coefficient: return e;
    case Op::Grad: return grad(c[0]);
    case Op::Div: return div(c[0]);
    case Op::Dx: return Dx(c[0], e.node().idx[0]);
    case Op::Transpose: return transpose(c[0]);
    case Op::Index:
      return e.node().idx[1] < 0 ? component(c[0], e.node().idx[0])
                                 : component(c[0], e.node().idx[0], e.node().idx[1]);
    case Op::ListVector: return as_vector(c[0], c[1]);
    case Op::ListTensor: return as_matrix(c[0], c[1], c[2], c[3]);
    case Op::Sum: return c[0] + c[1];
    case Op::Negate: return -c[0];
    case Op::Product: return c[0] * c[1];
    case Op::Quotient: return c[0] / c[1];
    case Op::Power: return pow(c[0], c[1]);
    case Op::Inner: return inner(c[0], c[1]);
    case Op::Dot: return dot(c[0], c[1]);
    case Op::Exp: return exp(c[0]);
    case Op::Log: return ln(c[0]);
    case Op::Sqrt: return sqrt(c[0]);
    case Op::Abs: return abs(c[0]);
    case Op::Sign: return sign(c[0]);
    case Op::Sin: return sin(c[0]);
    case Op::Cos: return cos(c[0]);
  }
  throw AssemblyError("unknown node kind");
}

namespace {

std::string number(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void sexpr(const Expr& e, std::string& out) {
  const auto& n = e.node();
  switch (n.op) {
    case Op::Zero:
      out += n.rank == 0 ? "0" : "(zero " + std::to_string(n.rank) + ")";
      return;
    case Op::Constant: out += number(n.value); return;
    case Op::Identity:
    case Op::SpatialCoordinate:
    case Op::FacetNormal:
    case Op::CellDiameter: out += op_name(n.op); return;
    case Op::Test:
    case Op::Trial:
    case Op::Coefficient: out += n.name; return;
    default: break;
  }
  out += '(';
  if (n.op == Op::Dx)
    out += "dx" + std::to_string(n.idx[0]);
  else
    out += op_name(n.op);
  for (const auto& c : n.children) {
    out += ' ';
    sexpr(c, out);
  }
  if (n.op == Op::Index) {
    out += ' ' + std::to_string(n.idx[0]);
    if (n.idx[1] >= 0) out += ' ' + std::to_string(n.idx[1]);
  }
  out += ')';
}

}  // namespace

std::string to_sexpr(const Expr& e) {
  std::string out;
  sexpr(e, out);
  return out;
}

bool has_derivative(const Expr& e) {
  if (e.op() == Op::Grad || e.op() == Op::Div || e.op() == Op::Dx) return true;
  for (const auto& c : e.children())
    if (has_derivative(c)) return true;
  return false;
}

}  // namespace ranslab
