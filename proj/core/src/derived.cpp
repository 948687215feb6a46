#include "ranslab/derived.hpp"

#include <cmath>
#include <spdlog/spdlog.h>

#include "ranslab/error.hpp"

namespace ranslab {

DQMode parse_dq_mode(const std::string& s) {
  if (s == "project") return DQMode::Project;
  if (s == "use_formula") return DQMode::UseFormula;
  if (s == "compute_dofs") return DQMode::ComputeDofs;
  throw ConfigurationError("unknown derived quantity mode '" + s + "'");
}

namespace {

using Val = std::array<double, 4>;

int ncomp(int rank) { return rank == 0 ? 1 : rank == 1 ? 2 : 4; }

// Value of component `comp` of a coefficient at a node of the target space.
double coefficient_at(const FieldFunction& f, const FunctionSpace& target, int node, int comp) {
  const auto& V = *f.space()->block(0);
  if (V.mesh() != target.mesh()) throw ModeError("compute_dofs: coefficient lives on another mesh");
  const int vs = V.element().value_size();
  const auto& mesh = *target.mesh();
  const int nv = static_cast<int>(mesh.vertices().size());
  if (node < nv || V.element().degree == target.element().degree) return f[V.dof(node, comp)];
  // P2 target node on an edge, P1 coefficient: the linear interpolant is the edge average.
  const auto& e = mesh.edges()[node - nv];
  return 0.5 * (f[e[0] * vs + comp] + f[e[1] * vs + comp]);
}

Val eval(const Expr& e, const FunctionSpace& target, int node) {
  Val out{0, 0, 0, 0};
  const auto& n = e.node();
  auto A = [&](int k) { return eval(e(k), target, node); };
  switch (n.op) {
    case Op::Zero: break;
    case Op::Constant: out[0] = n.value; break;
    case Op::Identity: out = {1, 0, 0, 1}; break;
    case Op::SpatialCoordinate: {
      const auto& x = target.node_coordinates()[node];
      out[0] = x[0];
      out[1] = x[1];
      break;
    }
    case Op::Coefficient: {
      const auto& el = n.field.space()->block(0)->element();
      if (el.shape == ValueShape::SymTensor) {
        const double xx = coefficient_at(n.field, target, node, 0);
        const double xy = coefficient_at(n.field, target, node, 1);
        const double yy = coefficient_at(n.field, target, node, 2);
        out = {xx, xy, xy, yy};
      } else {
        for (int k = 0; k < el.value_size(); ++k) out[k] = coefficient_at(n.field, target, node, k);
      }
      break;
    }
    case Op::Transpose: {
      Val a = A(0);
      out = {a[0], a[2], a[1], a[3]};
      break;
    }
    case Op::Index: {
      Val a = A(0);
      const int r = e(0).rank();
      if (r == 1)
        out[0] = a[n.idx[0]];
      else if (n.idx[1] >= 0)
        out[0] = a[2 * n.idx[0] + n.idx[1]];
      else
        out = {a[2 * n.idx[0]], a[2 * n.idx[0] + 1], 0, 0};
      break;
    }
    case Op::ListVector:
    case Op::ListTensor:
      for (std::size_t k = 0; k < n.children.size(); ++k) out[k] = A(static_cast<int>(k))[0];
      break;
    case Op::Sum: {
      Val a = A(0), b = A(1);
      for (int k = 0; k < 4; ++k) out[k] = a[k] + b[k];
      break;
    }
    case Op::Negate: {
      Val a = A(0);
      for (int k = 0; k < 4; ++k) out[k] = -a[k];
      break;
    }
    case Op::Product: {
      Val a = A(0), b = A(1);
      if (e(0).rank() == 0)
        for (int k = 0; k < 4; ++k) out[k] = a[0] * b[k];
      else
        for (int k = 0; k < 4; ++k) out[k] = a[k] * b[0];
      break;
    }
    case Op::Quotient: {
      Val a = A(0), b = A(1);
      for (int k = 0; k < ncomp(e.rank()); ++k) out[k] = a[k] / b[0];
      break;
    }
    case Op::Power: out[0] = std::pow(A(0)[0], A(1)[0]); break;
    case Op::Inner: {
      Val a = A(0), b = A(1);
      for (int k = 0; k < ncomp(e(0).rank()); ++k) out[0] += a[k] * b[k];
      break;
    }
    case Op::Dot: {
      Val a = A(0), b = A(1);
      const int ra = e(0).rank(), rb = e(1).rank();
      if (ra == 1 && rb == 1)
        out[0] = a[0] * b[0] + a[1] * b[1];
      else if (ra == 2 && rb == 1)
        out = {a[0] * b[0] + a[1] * b[1], a[2] * b[0] + a[3] * b[1], 0, 0};
      else if (ra == 1 && rb == 2)
        out = {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], 0, 0};
      else
        out = {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
               a[2] * b[1] + a[3] * b[3]};
      break;
    }
    case Op::Exp: out[0] = std::exp(A(0)[0]); break;
    case Op::Log: out[0] = std::log(A(0)[0]); break;
    case Op::Sqrt: out[0] = std::sqrt(A(0)[0]); break;
    case Op::Abs: out[0] = std::abs(A(0)[0]); break;
    case Op::Sign: {
      const double v = A(0)[0];
      out[0] = v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0;
      break;
    }
    case Op::Sin: out[0] = std::sin(A(0)[0]); break;
    case Op::Cos: out[0] = std::cos(A(0)[0]); break;
    default:
      throw ModeError(std::string("'") + op_name(n.op) + "' cannot be evaluated dof-wise");
  }
  return out;
}

}  // namespace

std::array<double, 4> evaluate_at_node(const Expr& e, const FunctionSpace& target, int node) {
  if (has_derivative(e)) throw ModeError("dof-wise evaluation of an expression with derivatives");
  return eval(e, target, node);
}

FieldFunction project(const Expr& f, const SpacePtr& space, const std::string& name) {
  auto u = trial_function(space);
  auto v = test_function(space);
  auto A = assemble_matrix(inner(u, v) * dx, space, space);
  auto b = assemble_vector(inner(f, v) * dx, space);
  FieldFunction out(space, name);
  out.assign(sparse_lu_solve(A, b));
  return out;
}

DerivedQuantity::DerivedQuantity(std::string name, SpacePtr space, std::string formula, DQMode mode,
                                 DQBoundary boundary, std::vector<int> wall_markers, PeriodicDofs periodic,
                                 double omega)
    : name_(std::move(name)),
      space_(std::move(space)),
      formula_(std::move(formula)),
      mode_(mode),
      boundary_(boundary),
      wall_markers_(std::move(wall_markers)),
      periodic_(std::move(periodic)),
      omega_(omega),
      field_(space_, name_) {
  if (space_->num_blocks() != 1) throw InvalidArgument("derived quantity '" + name_ + "' needs a plain space");
  if (boundary_ == DQBoundary::Wall) {
    for (int m : wall_markers_)
      if (space_->mesh()->has_marker(m)) bcs_.emplace_back(space_, 0, -1, m, 0.0);
  }
}

Expr DerivedQuantity::expression(const Namespace& ns) const {
  Expr e = parse_formula(formula_, ns);
  if (mode_ == DQMode::ComputeDofs && has_derivative(e))
    throw ModeError("derived quantity '" + name_ + "': compute_dofs needs a pointwise formula, got '" + formula_ +
                    "'");
  const int want = space_->block(0)->element().rank();
  if (e.rank() != want)
    throw ShapeError("derived quantity '" + name_ + "' has rank " + std::to_string(e.rank()) + ", space expects " +
                     std::to_string(want));
  return e;
}

Expr DerivedQuantity::bind(const Namespace& ns) const {
  if (mode_ == DQMode::UseFormula) return expression(ns);
  return coefficient(field_);
}

void DerivedQuantity::project(const Expr& f) {
  if (M_.rows() == 0) {
    auto u = trial_function(space_);
    auto v = test_function(space_);
    M_ = assemble_matrix(inner(u, v) * dx, space_, space_);
    apply_periodic(M_, periodic_);
    apply_dirichlet(M_, bcs_);
    lu_.factorize(M_);
  }
  auto b = assemble_vector(inner(f, test_function(space_)) * dx, space_);
  apply_periodic(b, periodic_);
  apply_dirichlet(b, bcs_);
  auto xnew = lu_.solve(b);
  auto x = field_.values();
  const double w = initialized_ ? omega_ : 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - w) * x[i] + w * xnew[i];
}

void DerivedQuantity::compute_dofs(const Expr& f) {
  const auto& V = *space_->block(0);
  const int vs = V.element().value_size();
  const bool sym = V.element().shape == ValueShape::SymTensor;
  auto x = field_.values();
  const double w = initialized_ ? omega_ : 1.0;
  for (int n = 0; n < V.num_nodes(); ++n) {
    auto val = eval(f, V, n);
    if (sym) val = {val[0], val[1], val[3], 0.0};
    for (int c = 0; c < vs; ++c) {
      double& xi = x[V.dof(n, c)];
      xi = (1.0 - w) * xi + w * val[c];
    }
  }
  for (const auto& bc : bcs_)
    for (int d : bc.dofs()) x[d] = 0.0;
}

void DerivedQuantity::update(const Namespace& ns) {
  if (mode_ == DQMode::UseFormula) return;
  Expr f = expression(ns);
  if (mode_ == DQMode::Project)
    project(f);
  else
    compute_dofs(f);
  initialized_ = true;
  if (!all_finite(field_.values())) spdlog::warn("derived quantity '{}' has non-finite values", name_);
}

void update_all(std::vector<DerivedQuantity>& dqs, Namespace& ns) {
  for (auto& dq : dqs) {
    dq.update(ns);
    ns[dq.name()] = dq.bind(ns);
  }
}

}  // namespace ranslab
