#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "ranslab/function_space.hpp"

namespace ranslab {

enum class Op {
  Zero,
  Constant,
  Identity,
  SpatialCoordinate,
  FacetNormal,
  CellDiameter,
  Test,
  Trial,
  Coefficient,
  Grad,
  Div,
  Dx,
  Transpose,
  Index,
  ListVector,
  ListTensor,
  Sum,
  Negate,
  Product,
  Quotient,
  Power,
  Inner,
  Dot,
  Exp,
  Log,
  Sqrt,
  Abs,
  Sign,
  Sin,
  Cos,
};

const char* op_name(Op op);

class Expr;

struct Node {
  Op op = Op::Zero;
  int rank = 0;
  double value = 0.0;                 // Constant
  std::array<int, 2> idx{-1, -1};     // Dx direction, Index components
  std::vector<Expr> children;
  SpacePtr space;                     // Test, Trial
  int block = -1;
  FieldFunction field;                // Coefficient
  std::string name;
  bool has_test = false;
  bool has_trial = false;
};

/// Immutable, shareable expression handle. Values are scalars, 2-vectors or 2x2 tensors.
class Expr {
 public:
  Expr() = default;
  Expr(double c);  // NOLINT(google-explicit-constructor)
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  explicit operator bool() const { return static_cast<bool>(n_); }
  const Node& node() const { return *n_; }
  const Node* get() const { return n_.get(); }
  Op op() const { return n_->op; }
  int rank() const { return n_->rank; }
  bool is_zero() const { return n_->op == Op::Zero; }
  bool is_constant() const { return n_->op == Op::Constant || (n_->op == Op::Zero && n_->rank == 0); }
  double constant_value() const { return n_->op == Op::Constant ? n_->value : 0.0; }
  bool has_test() const { return n_->has_test; }
  bool has_trial() const { return n_->has_trial; }
  const std::vector<Expr>& children() const { return n_->children; }
  const Expr& operator()(std::size_t i) const { return n_->children[i]; }

  Expr operator[](int i) const;
  Expr T() const;

 private:
  std::shared_ptr<const Node> n_;
};

Expr zero(int rank = 0);
Expr constant(double v);
Expr identity();
Expr spatial_coordinate();
Expr facet_normal();
Expr cell_diameter();
Expr test_function(const SpacePtr& space, int block = 0);
Expr trial_function(const SpacePtr& space, int block = 0);
std::vector<Expr> test_functions(const SpacePtr& space);
std::vector<Expr> trial_functions(const SpacePtr& space);
/// Coefficient leaf; the field must live on a one-block space.
Expr coefficient(const FieldFunction& f);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& a, const Expr& b);
Expr grad(const Expr& a);
Expr div(const Expr& a);
Expr Dx(const Expr& a, int direction);
Expr transpose(const Expr& a);
Expr inner(const Expr& a, const Expr& b);
Expr dot(const Expr& a, const Expr& b);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);
Expr abs(const Expr& a);
Expr sign(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sym(const Expr& a);
Expr component(const Expr& a, int i);
Expr component(const Expr& a, int i, int j);
Expr as_vector(const Expr& a, const Expr& b);
Expr as_matrix(const Expr& a00, const Expr& a01, const Expr& a10, const Expr& a11);

/// Rebuild a node of the same kind over new children (constant folding applies).
Expr rebuild(const Expr& e, std::vector<Expr> children);

/// S-expression rendering, used for golden tests and error messages.
std::string to_sexpr(const Expr& e);

/// True when the expression contains a Grad/Div/Dx node.
bool has_derivative(const Expr& e);

}  // namespace ranslab
