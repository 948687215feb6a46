#include "ranslab/form.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "ranslab/error.hpp"

namespace ranslab {

int Form::arity() const {
  int a = 0;
  for (const auto& i : integrals) {
    if (i.integrand.has_trial()) return 2;
    if (i.integrand.has_test()) a = 1;
  }
  return a;
}

Form& Form::operator+=(const Form& o) {
  integrals.insert(integrals.end(), o.integrals.begin(), o.integrals.end());
  return *this;
}

Form& Form::operator-=(const Form& o) { return *this += -o; }

Form operator*(const Expr& integrand, const Measure& m) {
  if (integrand.rank() != 0) throw ShapeError("integrand must be scalar-valued");
  Form f;
  if (!integrand.is_zero()) f.integrals.push_back({integrand, m});
  return f;
}

Form operator+(Form a, const Form& b) { return a += b; }
Form operator-(Form a, const Form& b) { return a -= b; }

Form operator-(const Form& a) {
  Form out;
  for (const auto& i : a.integrals) out.integrals.push_back({-i.integrand, i.measure});
  return out;
}

Form operator*(double s, const Form& f) {
  Form out;
  for (const auto& i : f.integrals) {
    Expr e = constant(s) * i.integrand;
    if (!e.is_zero()) out.integrals.push_back({e, i.measure});
  }
  return out;
}

Expr transform(const Expr& e, const std::function<Expr(const Expr&, const std::vector<Expr>&)>& f) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> rec = [&](const Expr& x) -> Expr {
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    std::vector<Expr> ch;
    bool changed = false;
    for (const auto& c : x.children()) {
      ch.push_back(rec(c));
      changed = changed || ch.back().get() != c.get();
    }
    Expr r = f(x, ch);
    if (!r) r = changed ? rebuild(x, ch) : x;
    memo.emplace(x.get(), r);
    return r;
  };
  return rec(e);
}

namespace {

bool is_leaf_argument(Op op) { return op == Op::Test || op == Op::Trial || op == Op::Coefficient; }

bool is_chain(const Expr& e) {
  if (is_leaf_argument(e.op())) return true;
  if (e.op() == Op::Grad || e.op() == Op::Dx) return is_chain(e(0));
  return false;
}

int chain_order(const Expr& e) { return is_leaf_argument(e.op()) ? 0 : 1 + chain_order(e(0)); }

const Expr& chain_leaf(const Expr& e) { return is_leaf_argument(e.op()) ? e : chain_leaf(e(0)); }

int leaf_degree(const Expr& leaf) {
  const auto& n = leaf.node();
  if (n.op == Op::Coefficient) return n.field.space()->block(0)->element().degree;
  return n.space->block(n.block)->element().degree;
}

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

Expr rewrap_chain(const Expr& chain, const Expr& leaf) {
  if (is_leaf_argument(chain.op())) return leaf;
  Expr inner_ = rewrap_chain(chain(0), leaf);
  return chain.op() == Op::Grad ? grad(inner_) : Dx(inner_, chain.node().idx[0]);
}

class Expander {
 public:
  Expr expand(const Expr& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    keep_.push_back(e);
    Expr r = expand_impl(e);
    memo_.emplace(e.get(), r);
    return r;
  }

  Expr D(const Expr& e, int d) {
    auto key = std::make_pair(e.get(), d);
    auto it = dmemo_.find(key);
    if (it != dmemo_.end()) return it->second;
    Expr r = D_impl(e, d);
    dmemo_.emplace(key, r);
    return r;
  }

 private:
  std::unordered_map<const Node*, Expr> memo_;
  std::map<std::pair<const Node*, int>, Expr> dmemo_;
  std::vector<Expr> keep_;

  Expr expand_impl(const Expr& e) {
    switch (e.op()) {
      case Op::Grad: {
        Expr c = expand(e(0));
        return grad_of(c);
      }
      case Op::Div: {
        Expr c = expand(e(0));
        if (c.rank() == 1) return component(D(c, 0), 0) + component(D(c, 1), 1);
        return as_vector(component(D(c, 0), 0, 0) + component(D(c, 1), 0, 1),
                         component(D(c, 0), 1, 0) + component(D(c, 1), 1, 1));
      }
      case Op::Dx: return D(expand(e(0)), e.node().idx[0]);
      default: break;
    }
    std::vector<Expr> ch;
    bool changed = false;
    for (const auto& c : e.children()) {
      ch.push_back(expand(c));
      changed = changed || ch.back().get() != c.get();
    }
    return changed ? rebuild(e, ch) : e;
  }

  Expr grad_of(const Expr& c) {
    if (is_chain(c)) {
      if (chain_order(c) + 1 > leaf_degree(chain_leaf(c))) return zero(c.rank() + 1);
      return grad(c);
    }
    if (c.op() == Op::SpatialCoordinate) return identity();
    if (piecewise_constant(c)) return zero(c.rank() + 1);
    if (c.rank() == 0) return as_vector(D(c, 0), D(c, 1));
    if (c.rank() == 1)
      return as_matrix(component(D(c, 0), 0), component(D(c, 1), 0), component(D(c, 0), 1), component(D(c, 1), 1));
    throw ShapeError("grad of a tensor exceeds the supported rank");
  }

  Expr D_impl(const Expr& e, int d) {
    keep_.push_back(e);
    if (is_chain(e)) {
      if (chain_order(e) + 1 > leaf_degree(chain_leaf(e))) return zero(e.rank());
      return Dx(e, d);
    }
    if (piecewise_constant(e)) return zero(e.rank());
    const auto& c = e.children();
    switch (e.op()) {
      case Op::SpatialCoordinate: return as_vector(constant(d == 0 ? 1.0 : 0.0), constant(d == 1 ? 1.0 : 0.0));
      case Op::Sum: return D(c[0], d) + D(c[1], d);
      case Op::Negate: return -D(c[0], d);
      case Op::Product: return D(c[0], d) * c[1] + c[0] * D(c[1], d);
      case Op::Quotient: return D(c[0], d) / c[1] - c[0] * D(c[1], d) / (c[1] * c[1]);
      case Op::Power:
        if (c[1].is_constant()) return c[1] * pow(c[0], c[1] - constant(1.0)) * D(c[0], d);
        return e * (D(c[1], d) * ln(c[0]) + c[1] * D(c[0], d) / c[0]);
      case Op::Inner: return inner(D(c[0], d), c[1]) + inner(c[0], D(c[1], d));
      case Op::Dot: return dot(D(c[0], d), c[1]) + dot(c[0], D(c[1], d));
      case Op::Exp: return e * D(c[0], d);
      case Op::Log: return D(c[0], d) / c[0];
      case Op::Sqrt: return D(c[0], d) / (constant(2.0) * e);
      case Op::Abs: return sign(c[0]) * D(c[0], d);
      case Op::Sign: return zero(0);
      case Op::Sin: return cos(c[0]) * D(c[0], d);
      case Op::Cos: return -(sin(c[0]) * D(c[0], d));
      case Op::Transpose: return transpose(D(c[0], d));
      case Op::Index: return rebuild(e, {D(c[0], d)});
      case Op::ListVector: return as_vector(D(c[0], d), D(c[1], d));
      case Op::ListTensor: return as_matrix(D(c[0], d), D(c[1], d), D(c[2], d), D(c[3], d));
      default: break;
    }
    throw AssemblyError(std::string("cannot differentiate node '") + op_name(e.op()) + "' after expansion");
  }
};

struct TrialSplit {
  Expr a;  // linear in trial
  Expr l;  // trial-free
};

TrialSplit split_by_trial(const Expr& e) {
  if (!e.has_trial()) return {zero(e.rank()), e};
  const auto& c = e.children();
  auto bilinear = [&](auto&& op) -> TrialSplit {
    if (c[0].has_trial() && c[1].has_trial())
      throw NonlinearityError("term is not linear in the trial function: " + to_sexpr(e));
    if (c[0].has_trial()) {
      auto s = split_by_trial(c[0]);
      return {op(s.a, c[1]), op(s.l, c[1])};
    }
    auto s = split_by_trial(c[1]);
    return {op(c[0], s.a), op(c[0], s.l)};
  };
  switch (e.op()) {
    case Op::Trial: return {e, zero(e.rank())};
    case Op::Sum: {
      auto x = split_by_trial(c[0]);
      auto y = split_by_trial(c[1]);
      return {x.a + y.a, x.l + y.l};
    }
    case Op::Negate: {
      auto x = split_by_trial(c[0]);
      return {-x.a, -x.l};
    }
    case Op::Product: return bilinear([](const Expr& a, const Expr& b) { return a * b; });
    case Op::Inner: return bilinear([](const Expr& a, const Expr& b) { return inner(a, b); });
    case Op::Dot: return bilinear([](const Expr& a, const Expr& b) { return dot(a, b); });
    case Op::Quotient: {
      if (c[1].has_trial()) throw NonlinearityError("trial function in a denominator: " + to_sexpr(e));
      auto x = split_by_trial(c[0]);
      return {x.a / c[1], x.l / c[1]};
    }
    case Op::Grad:
    case Op::Div:
    case Op::Dx:
    case Op::Transpose:
    case Op::Index: {
      auto x = split_by_trial(c[0]);
      return {rebuild(e, {x.a}), rebuild(e, {x.l})};
    }
    case Op::ListVector:
    case Op::ListTensor: {
      std::vector<Expr> ca, cl;
      for (const auto& ch : c) {
        auto x = split_by_trial(ch);
        ca.push_back(x.a);
        cl.push_back(x.l);
      }
      return {rebuild(e, ca), rebuild(e, cl)};
    }
    default: break;
  }
  throw NonlinearityError("term is not linear in the trial function: " + to_sexpr(e));
}

class Differentiator {
 public:
  explicit Differentiator(const FieldFunction& w) : w_(w) {}

  Expr G(const Expr& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    keep_.push_back(e);
    Expr r = G_impl(e);
    memo_.emplace(e.get(), r);
    return r;
  }

 private:
  FieldFunction w_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_;

  int matching_block(const Expr& leaf) const {
    if (leaf.op() != Op::Coefficient) return -1;
    const auto& f = leaf.node().field;
    if (f.storage() != w_.storage()) return -1;
    const auto& S = *w_.space();
    for (int b = 0; b < S.num_blocks(); ++b)
      if (f.offset() == w_.offset() + static_cast<std::size_t>(S.offset(b)) &&
          f.space()->block(0) == S.block(b))
        return b;
    return -1;
  }

  Expr G_impl(const Expr& e) {
    if (is_chain(e)) {
      const int b = matching_block(chain_leaf(e));
      if (b < 0) return zero(e.rank());
      Expr t = trial_function(w_.space(), b);
      return rewrap_chain(e, t);
    }
    if (e.children().empty()) return zero(e.rank());
    const auto& c = e.children();
    switch (e.op()) {
      case Op::Sum: return G(c[0]) + G(c[1]);
      case Op::Negate: return -G(c[0]);
      case Op::Product: return G(c[0]) * c[1] + c[0] * G(c[1]);
      case Op::Quotient: return G(c[0]) / c[1] - c[0] * G(c[1]) / (c[1] * c[1]);
      case Op::Power:
        if (c[1].is_constant()) return c[1] * pow(c[0], c[1] - constant(1.0)) * G(c[0]);
        return e * (G(c[1]) * ln(c[0]) + c[1] * G(c[0]) / c[0]);
      case Op::Inner: return inner(G(c[0]), c[1]) + inner(c[0], G(c[1]));
      case Op::Dot: return dot(G(c[0]), c[1]) + dot(c[0], G(c[1]));
      case Op::Exp: return e * G(c[0]);
      case Op::Log: return G(c[0]) / c[0];
      case Op::Sqrt: return G(c[0]) / (constant(2.0) * e);
      case Op::Abs: return sign(c[0]) * G(c[0]);
      case Op::Sign: return zero(0);
      case Op::Sin: return cos(c[0]) * G(c[0]);
      case Op::Cos: return -(sin(c[0]) * G(c[0]));
      case Op::Transpose:
      case Op::Index: return rebuild(e, {G(c[0])});
      case Op::ListVector: return as_vector(G(c[0]), G(c[1]));
      case Op::ListTensor: return as_matrix(G(c[0]), G(c[1]), G(c[2]), G(c[3]));
      default: break;
    }
    throw AssemblyError(std::string("cannot differentiate node '") + op_name(e.op()) + "'");
  }
};

}  // namespace

Expr expand_derivatives(const Expr& e) {
  Expander x;
  return x.expand(e);
}

std::pair<Form, Form> lhs_rhs(const Form& F) {
  Form a, L;
  for (const auto& i : F.integrals) {
    auto s = split_by_trial(i.integrand);
    if (!s.a.is_zero()) a.integrals.push_back({s.a, i.measure});
    if (!s.l.is_zero()) L.integrals.push_back({-s.l, i.measure});
  }
  return {a, L};
}

Form action(const Form& F, const FieldFunction& w) {
  if (!w.valid()) throw InvalidArgument("action needs a field");
  Form out;
  for (const auto& i : F.integrals) {
    Expr e = transform(i.integrand, [&](const Expr& x, const std::vector<Expr>&) -> Expr {
      if (x.op() != Op::Trial) return Expr();
      if (x.node().space != w.space())
        throw InvalidArgument("action: coefficient does not live on the trial space");
      return coefficient(w.sub(x.node().block));
    });
    if (!e.is_zero()) out.integrals.push_back({e, i.measure});
  }
  return out;
}

Expr gateaux_derivative(const Expr& e, const FieldFunction& w) {
  Differentiator d(w);
  return d.G(expand_derivatives(e));
}

Form gateaux_derivative(const Form& F, const FieldFunction& w) {
  if (!w.valid()) throw InvalidArgument("derivative needs a field");
  // The derivative is integrated with the rule the residual gets, so J is the exact derivative of assembled F.
  std::map<std::pair<int, int>, int> degree;
  std::vector<Expr> expanded;
  for (const auto& i : F.integrals) {
    if (i.integrand.has_trial()) throw InvalidArgument("derivative: form still contains a trial function");
    expanded.push_back(expand_derivatives(i.integrand));
    const int q = i.measure.degree >= 0 ? i.measure.degree : default_quadrature_degree(expanded.back());
    auto key = std::make_pair(static_cast<int>(i.measure.kind), i.measure.marker);
    degree[key] = std::max(degree.count(key) ? degree[key] : 0, q);
  }
  Form out;
  Differentiator d(w);
  for (std::size_t n = 0; n < F.integrals.size(); ++n) {
    const auto& m = F.integrals[n].measure;
    Expr e = d.G(expanded[n]);
    if (!e.is_zero())
      out.integrals.push_back({e, m.with_degree(degree[std::make_pair(static_cast<int>(m.kind), m.marker)])});
  }
  return out;
}

int default_quadrature_degree(const Expr& integrand, int cap) {
  const int p = argument_degree(integrand);
  const int est = std::min(estimate_degree(integrand), cap);
  return std::max(est, p > 0 ? 2 * p + 1 : 0);
}

int estimate_degree(const Expr& e) {
  std::unordered_map<const Node*, int> memo;
  std::function<int(const Expr&)> rec = [&](const Expr& x) -> int {
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    int r = 0;
    if (is_chain(x)) {
      r = std::max(0, leaf_degree(chain_leaf(x)) - chain_order(x));
    } else {
      std::vector<int> d;
      for (const auto& c : x.children()) d.push_back(rec(c));
      switch (x.op()) {
        case Op::SpatialCoordinate: r = 1; break;
        case Op::Product:
        case Op::Inner:
        case Op::Dot:
        case Op::Quotient: r = d[0] + d[1]; break;
        case Op::Power: {
          const double p = x(1).constant_value();
          if (x(1).is_constant() && p >= 0 && p == static_cast<int>(p))
            r = d[0] * static_cast<int>(p);
          else
            r = d[0] + 2;
          break;
        }
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
        case Op::Sin:
        case Op::Cos: r = d[0] == 0 ? 0 : d[0] + 2; break;
        default:
          for (int v : d) r = std::max(r, v);
      }
    }
    memo.emplace(x.get(), r);
    return r;
  };
  return rec(e);
}

int argument_degree(const Expr& e) {
  int p = 0;
  std::function<void(const Expr&)> rec = [&](const Expr& x) {
    if (x.op() == Op::Test || x.op() == Op::Trial) p = std::max(p, leaf_degree(x));
    if (x.has_test() || x.has_trial())
      for (const auto& c : x.children()) rec(c);
  };
  rec(e);
  return p;
}

}  // namespace ranslab
