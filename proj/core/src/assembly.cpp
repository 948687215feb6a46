#include "ranslab/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "ranslab/error.hpp"
#include "ranslab/quadrature.hpp"

namespace ranslab {

namespace {

using Val = std::array<double, 4>;

int ncomp(int rank) { return rank == 0 ? 1 : rank == 1 ? 2 : 4; }

bool is_leaf_argument(Op op) { return op == Op::Test || op == Op::Trial || op == Op::Coefficient; }

bool is_chain(const Expr& e) {
  if (is_leaf_argument(e.op())) return true;
  if (e.op() == Op::Grad || e.op() == Op::Dx) return is_chain(e(0));
  return false;
}

enum Cls { kNone = 0, kTest = 1, kTrial = 2, kBoth = 3 };

// Derivative codes into a per-point table: value, d/dx, d/dy, d2/dx2, d2/dxdy, d2/dy2.
constexpr int kNumCodes = 6;

int deriv_code(const std::vector<int>& dirs) {
  if (dirs.empty()) return 0;
  if (dirs.size() == 1) return 1 + dirs[0];
  return 3 + dirs[0] + dirs[1];
}

int stored_component(int leaf_rank, const std::vector<int>& vidx) {
  if (leaf_rank == 0) return 0;
  if (leaf_rank == 1) return vidx[0];
  return vidx[0] + vidx[1];  // symmetric (xx, xy, yy)
}

struct Chain {
  int leaf_kind = 0;  // Cls of the leaf: kNone (coefficient), kTest, kTrial
  int block = -1;     // argument block
  int coef = -1;      // coefficient index
  int ncomp = 1;
  std::array<int, 4> sc{};  // stored component per result component
  std::array<int, 4> dc{};  // derivative code per result component
};

Chain compile_chain(const Expr& e) {
  std::vector<const Expr*> ops;
  const Expr* leaf = &e;
  while (!is_leaf_argument(leaf->op())) {
    ops.push_back(leaf);
    leaf = &(*leaf)(0);
  }
  std::reverse(ops.begin(), ops.end());  // inner to outer
  const int r0 = leaf->rank();
  std::vector<int> fixed;    // Dx directions
  int ngrad = 0;
  // Sequence of derivative slots: -1 marks a free Grad index.
  std::vector<int> slots;
  for (const auto* op : ops) {
    if (op->op() == Op::Grad) {
      slots.push_back(-1);
      ++ngrad;
    } else {
      slots.push_back(op->node().idx[0]);
    }
  }
  Chain c;
  c.ncomp = ncomp(e.rank());
  const int R = r0 + ngrad;
  for (int k = 0; k < c.ncomp; ++k) {
    std::vector<int> ind;
    if (R == 1) ind = {k};
    if (R == 2) ind = {k / 2, k % 2};
    std::vector<int> vidx(ind.begin(), ind.begin() + r0);
    std::vector<int> dirs;
    int g = r0;
    for (int s : slots) dirs.push_back(s >= 0 ? s : ind[g++]);
    std::sort(dirs.begin(), dirs.end());
    c.sc[k] = stored_component(r0, vidx);
    c.dc[k] = deriv_code(dirs);
  }
  return c;
}

struct Instr {
  Op op;
  int rank;
  int cls;
  double value = 0.0;
  std::array<int, 2> idx{-1, -1};
  std::array<int, 2> ch{-1, -1};
  std::vector<int> list;  // ListVector/ListTensor children
  int chain = -1;
};

struct CoefRef {
  FieldFunction field;
  const FunctionSpace* V;
  int block_space = -1;  // index into the per-cell element table
};

struct Program {
  std::vector<Instr> instrs;
  std::vector<Chain> chains;
  std::vector<CoefRef> coefs;
  std::vector<int> order[4];
  int result = -1;
  int max_deriv = 0;
};

class Compiler {
 public:
  Program prog;

  int add(const Expr& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    keep_.push_back(e);
    Instr in;
    in.op = e.op();
    in.rank = e.rank();
    in.idx = e.node().idx;
    in.value = e.node().value;
    in.cls = (e.has_test() ? kTest : 0) | (e.has_trial() ? kTrial : 0);
    if (is_chain(e)) {
      Chain c = compile_chain(e);
      const Expr* leaf = &e;
      int order = 0;
      while (!is_leaf_argument(leaf->op())) {
        leaf = &(*leaf)(0);
        ++order;
      }
      prog.max_deriv = std::max(prog.max_deriv, order);
      const auto& n = leaf->node();
      if (n.op == Op::Coefficient) {
        c.leaf_kind = kNone;
        c.coef = coef_index(n.field);
      } else {
        c.leaf_kind = n.op == Op::Test ? kTest : kTrial;
        c.block = n.block;
      }
      in.chain = static_cast<int>(prog.chains.size());
      prog.chains.push_back(c);
    } else if (e.op() == Op::ListVector || e.op() == Op::ListTensor) {
      for (const auto& ch : e.children()) in.list.push_back(add(ch));
    } else if (e.op() == Op::Grad || e.op() == Op::Div || e.op() == Op::Dx) {
      throw AssemblyError("derivative of a composite expression reached the assembler");
    } else {
      for (std::size_t k = 0; k < e.children().size(); ++k) in.ch[k] = add(e(k));
    }
    const int id = static_cast<int>(prog.instrs.size());
    prog.instrs.push_back(std::move(in));
    prog.order[prog.instrs.back().cls].push_back(id);
    memo_.emplace(e.get(), id);
    return id;
  }

 private:
  std::unordered_map<const Node*, int> memo_;
  std::vector<Expr> keep_;

  int coef_index(const FieldFunction& f) {
    for (std::size_t k = 0; k < prog.coefs.size(); ++k) {
      const auto& g = prog.coefs[k].field;
      if (g.storage() == f.storage() && g.offset() == f.offset() && g.space()->block(0) == f.space()->block(0))
        return static_cast<int>(k);
    }
    prog.coefs.push_back({f, f.space()->block(0).get()});
    return static_cast<int>(prog.coefs.size()) - 1;
  }
};

struct BasisFn {
  int block;
  int node;
  int comp;
  int dof;
};

// Physical basis tables of one element at one point: [node][code].
using PhysTable = std::array<std::array<double, kNumCodes>, 6>;

struct PointContext {
  Point x{};
  Point n{};
  double h = 0.0;
  const std::vector<std::array<std::array<double, kNumCodes>, 3>>* coef_vals = nullptr;  // [coef][comp][code]
};

void physical_table(const BasisTable& ref, const CellGeometry& g, PhysTable& out) {
  const auto& Ji = g.Jinv;  // grad_x = Ji^T grad_xi
  for (int i = 0; i < ref.n; ++i) {
    const double gx = Ji[0][0] * ref.dphi[i][0] + Ji[1][0] * ref.dphi[i][1];
    const double gy = Ji[0][1] * ref.dphi[i][0] + Ji[1][1] * ref.dphi[i][1];
    const double hxx = ref.d2phi[i][0], hxy = ref.d2phi[i][1], hyy = ref.d2phi[i][2];
    // H_x = Ji^T H_xi Ji
    auto hess = [&](int a, int b) {
      return Ji[0][a] * (hxx * Ji[0][b] + hxy * Ji[1][b]) + Ji[1][a] * (hxy * Ji[0][b] + hyy * Ji[1][b]);
    };
    out[i] = {ref.phi[i], gx, gy, hess(0, 0), hess(0, 1), hess(1, 1)};
  }
}

class Evaluator {
 public:
  explicit Evaluator(const Program& p) : p_(p), slots_(p.instrs.size()) {}

  void eval(const std::vector<int>& ids, const PointContext& ctx, const BasisFn* test, const PhysTable* ttab,
            const BasisFn* trial, const PhysTable* rtab) {
    for (int id : ids) eval_one(id, ctx, test, ttab, trial, rtab);
  }

  Val& slot(int id) { return slots_[id]; }

 private:
  const Program& p_;
  std::vector<Val> slots_;

  void eval_one(int id, const PointContext& ctx, const BasisFn* test, const PhysTable* ttab, const BasisFn* trial,
                const PhysTable* rtab) {
    const Instr& in = p_.instrs[id];
    Val& out = slots_[id];
    const int nc = ncomp(in.rank);
    if (in.chain >= 0) {
      const Chain& c = p_.chains[in.chain];
      if (c.leaf_kind == kNone) {
        const auto& cv = (*ctx.coef_vals)[c.coef];
        for (int k = 0; k < c.ncomp; ++k) out[k] = cv[c.sc[k]][c.dc[k]];
      } else {
        const BasisFn* b = c.leaf_kind == kTest ? test : trial;
        const PhysTable* t = c.leaf_kind == kTest ? ttab : rtab;
        if (b->block != c.block) {
          out = {0, 0, 0, 0};
        } else {
          for (int k = 0; k < c.ncomp; ++k) out[k] = c.sc[k] == b->comp ? (*t)[b->node][c.dc[k]] : 0.0;
        }
      }
      return;
    }
    auto A = [&](int k) -> const Val& { return slots_[in.ch[k]]; };
    switch (in.op) {
      case Op::Zero: out = {0, 0, 0, 0}; break;
      case Op::Constant: out[0] = in.value; break;
      case Op::Identity: out = {1, 0, 0, 1}; break;
      case Op::SpatialCoordinate: out[0] = ctx.x[0]; out[1] = ctx.x[1]; break;
      case Op::FacetNormal: out[0] = ctx.n[0]; out[1] = ctx.n[1]; break;
      case Op::CellDiameter: out[0] = ctx.h; break;
      case Op::Transpose: {
        const Val& a = A(0);
        out = {a[0], a[2], a[1], a[3]};
        break;
      }
      case Op::Index: {
        const Val& a = A(0);
        const int r = p_.instrs[in.ch[0]].rank;
        if (r == 1)
          out[0] = a[in.idx[0]];
        else if (in.idx[1] >= 0)
          out[0] = a[2 * in.idx[0] + in.idx[1]];
        else {
          out[0] = a[2 * in.idx[0]];
          out[1] = a[2 * in.idx[0] + 1];
        }
        break;
      }
      case Op::ListVector:
      case Op::ListTensor:
        for (std::size_t k = 0; k < in.list.size(); ++k) out[k] = slots_[in.list[k]][0];
        break;
      case Op::Sum: {
        const Val &a = A(0), &b = A(1);
        for (int k = 0; k < nc; ++k) out[k] = a[k] + b[k];
        break;
      }
      case Op::Negate: {
        const Val& a = A(0);
        for (int k = 0; k < nc; ++k) out[k] = -a[k];
        break;
      }
      case Op::Product: {
        const Instr& ia = p_.instrs[in.ch[0]];
        const Val &a = A(0), &b = A(1);
        if (ia.rank == 0) {
          for (int k = 0; k < nc; ++k) out[k] = a[0] * b[k];
        } else {
          for (int k = 0; k < nc; ++k) out[k] = a[k] * b[0];
        }
        break;
      }
      case Op::Quotient: {
        const Val &a = A(0), &b = A(1);
        for (int k = 0; k < nc; ++k) out[k] = a[k] / b[0];
        break;
      }
      case Op::Power: out[0] = std::pow(A(0)[0], A(1)[0]); break;
      case Op::Inner: {
        const Val &a = A(0), &b = A(1);
        const int m = ncomp(p_.instrs[in.ch[0]].rank);
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += a[k] * b[k];
        out[0] = s;
        break;
      }
      case Op::Dot: {
        const Val &a = A(0), &b = A(1);
        const int ra = p_.instrs[in.ch[0]].rank, rb = p_.instrs[in.ch[1]].rank;
        if (ra == 1 && rb == 1) {
          out[0] = a[0] * b[0] + a[1] * b[1];
        } else if (ra == 2 && rb == 1) {
          out[0] = a[0] * b[0] + a[1] * b[1];
          out[1] = a[2] * b[0] + a[3] * b[1];
        } else if (ra == 1 && rb == 2) {
          out[0] = a[0] * b[0] + a[1] * b[2];
          out[1] = a[0] * b[1] + a[1] * b[3];
        } else {
          const Val c = {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
                         a[2] * b[1] + a[3] * b[3]};
          out = c;
        }
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
      default: throw AssemblyError(std::string("cannot evaluate node '") + op_name(in.op) + "'");
    }
  }
};

std::vector<BasisFn> local_basis(const MixedSpace& S, int cell) {
  std::vector<BasisFn> out;
  for (int b = 0; b < S.num_blocks(); ++b) {
    const auto& V = *S.block(b);
    const int vs = V.element().value_size();
    auto nodes = V.cell_nodes(cell);
    for (int n = 0; n < static_cast<int>(nodes.size()); ++n)
      for (int c = 0; c < vs; ++c) out.push_back({b, n, c, S.offset(b) + nodes[n] * vs + c});
  }
  return out;
}

struct Group {
  MeasureKind kind;
  int marker;
  int degree;
  Expr integrand;
};

std::vector<Group> group_integrals(const Form& f, const AssemblyOptions& opt, int want_arity) {
  std::map<std::pair<int, int>, Group> groups;
  for (const auto& i : f.integrals) {
    const int ar = i.integrand.has_trial() ? 2 : i.integrand.has_test() ? 1 : 0;
    if (ar != want_arity)
      throw AssemblyError("integrand arity " + std::to_string(ar) + " does not match the requested output (" +
                          std::to_string(want_arity) + "): " + to_sexpr(i.integrand));
    Expr e = expand_derivatives(i.integrand);
    if (e.is_zero()) continue;
    int deg = i.measure.degree;
    if (deg < 0) {
      AssemblyOptions o = opt;
      deg = quadrature_degree(e, o);
    }
    auto key = std::make_pair(static_cast<int>(i.measure.kind), i.measure.marker);
    auto it = groups.find(key);
    if (it == groups.end()) {
      groups.emplace(key, Group{i.measure.kind, i.measure.marker, deg, e});
    } else {
      it->second.integrand = it->second.integrand + e;
      it->second.degree = std::max(it->second.degree, deg);
    }
  }
  std::vector<Group> out;
  for (auto& [k, g] : groups) out.push_back(g);
  return out;
}

// Assemble one group; `sink(test_dof, trial_dof, value)` for matrices, trial_dof = -1 for vectors.
template <class Sink>
void assemble_group(const Group& g, const MeshPtr& mesh, const SpacePtr& test, const SpacePtr& trial, Sink&& sink) {
  Compiler comp;
  comp.prog.result = comp.add(g.integrand);
  const Program& prog = comp.prog;
  for (const auto& c : prog.coefs)
    if (c.V->mesh() != mesh) throw AssemblyError("coefficient '" + c.field.name() + "' lives on another mesh");
  const bool has_test = static_cast<bool>(test);
  const bool has_trial = static_cast<bool>(trial);

  // Quadrature points in reference coordinates; facets map onto each local edge.
  QuadratureRule cell_rule;
  LineRule line_rule;
  if (g.kind == MeasureKind::Cell)
    cell_rule = triangle_rule(g.degree);
  else
    line_rule = gauss_line(g.degree);

  std::map<int, int> degree_slot;
  auto note_degree = [&](int d) { degree_slot.emplace(d, static_cast<int>(degree_slot.size())); };
  if (has_test)
    for (int b = 0; b < test->num_blocks(); ++b) note_degree(test->block(b)->element().degree);
  if (has_trial)
    for (int b = 0; b < trial->num_blocks(); ++b) note_degree(trial->block(b)->element().degree);
  for (const auto& c : prog.coefs) note_degree(c.V->element().degree);

  Evaluator ev(prog);
  std::vector<std::array<std::array<double, kNumCodes>, 3>> coef_vals(prog.coefs.size());
  std::vector<PhysTable> phys(degree_slot.size());
  PointContext ctx;
  ctx.coef_vals = &coef_vals;

  const int ncodes = prog.max_deriv >= 2 ? 6 : prog.max_deriv == 1 ? 3 : 1;
  std::vector<BasisFn> tb, rb;
  std::vector<Val> test_store, trial_store;
  std::vector<double> local;
  const auto& order = prog.order;

  auto run_point = [&](int cell, const CellGeometry& geo, double xi, double eta, double w) {
    for (auto [deg, s] : degree_slot) physical_table(evaluate_basis(deg, xi, eta), geo, phys[s]);
    const auto& v0 = mesh->vertices()[mesh->cells()[cell][0]];
    ctx.x = {v0[0] + geo.J[0][0] * xi + geo.J[0][1] * eta, v0[1] + geo.J[1][0] * xi + geo.J[1][1] * eta};
    for (std::size_t k = 0; k < prog.coefs.size(); ++k) {
      const auto& c = prog.coefs[k];
      const int vs = c.V->element().value_size();
      const auto& tab = phys[degree_slot.at(c.V->element().degree)];
      auto nodes = c.V->cell_nodes(cell);
      auto vals = c.field.values();
      for (auto& comp : coef_vals[k]) comp.fill(0.0);
      for (int n = 0; n < static_cast<int>(nodes.size()); ++n)
        for (int s = 0; s < vs; ++s) {
          const double cv = vals[nodes[n] * vs + s];
          if (cv == 0.0) continue;
          for (int d = 0; d < ncodes; ++d) coef_vals[k][s][d] += cv * tab[n][d];
        }
    }
    ev.eval(order[kNone], ctx, nullptr, nullptr, nullptr, nullptr);
    if (!has_test) {
      local[0] += w * ev.slot(prog.result)[0];
      return;
    }
    auto table_of = [&](const SpacePtr& S, const BasisFn& f) -> const PhysTable* {
      return &phys[degree_slot.at(S->block(f.block)->element().degree)];
    };
    const std::size_t nt = order[kTest].size(), nr = order[kTrial].size();
    for (std::size_t i = 0; i < tb.size(); ++i) {
      ev.eval(order[kTest], ctx, &tb[i], table_of(test, tb[i]), nullptr, nullptr);
      for (std::size_t k = 0; k < nt; ++k) test_store[i * nt + k] = ev.slot(order[kTest][k]);
    }
    if (!has_trial) {
      for (std::size_t i = 0; i < tb.size(); ++i) {
        for (std::size_t k = 0; k < nt; ++k) ev.slot(order[kTest][k]) = test_store[i * nt + k];
        local[i] += w * ev.slot(prog.result)[0];
      }
      return;
    }
    for (std::size_t j = 0; j < rb.size(); ++j) {
      ev.eval(order[kTrial], ctx, nullptr, nullptr, &rb[j], table_of(trial, rb[j]));
      for (std::size_t k = 0; k < nr; ++k) trial_store[j * nr + k] = ev.slot(order[kTrial][k]);
    }
    for (std::size_t i = 0; i < tb.size(); ++i) {
      for (std::size_t k = 0; k < nt; ++k) ev.slot(order[kTest][k]) = test_store[i * nt + k];
      for (std::size_t j = 0; j < rb.size(); ++j) {
        for (std::size_t k = 0; k < nr; ++k) ev.slot(order[kTrial][k]) = trial_store[j * nr + k];
        ev.eval(order[kBoth], ctx, &tb[i], table_of(test, tb[i]), &rb[j], table_of(trial, rb[j]));
        local[i * rb.size() + j] += w * ev.slot(prog.result)[0];
      }
    }
  };

  auto flush = [&]() {
    if (!has_test) {
      sink(-1, -1, local[0]);
    } else if (!has_trial) {
      for (std::size_t i = 0; i < tb.size(); ++i) sink(tb[i].dof, -1, local[i]);
    } else {
      for (std::size_t i = 0; i < tb.size(); ++i)
        for (std::size_t j = 0; j < rb.size(); ++j) sink(tb[i].dof, rb[j].dof, local[i * rb.size() + j]);
    }
  };

  auto prepare_cell = [&](int cell) {
    if (has_test) tb = local_basis(*test, cell);
    if (has_trial) rb = local_basis(*trial, cell);
    test_store.resize(tb.size() * order[kTest].size());
    trial_store.resize(rb.size() * order[kTrial].size());
    local.assign(std::max<std::size_t>(1, tb.size() * std::max<std::size_t>(1, rb.size())), 0.0);
  };

  if (g.kind == MeasureKind::Cell) {
    for (int cell = 0; cell < mesh->num_cells(); ++cell) {
      const auto geo = cell_geometry(*mesh, cell);
      ctx.h = geo.h;
      prepare_cell(cell);
      for (std::size_t q = 0; q < cell_rule.points.size(); ++q)
        run_point(cell, geo, cell_rule.points[q][0], cell_rule.points[q][1], cell_rule.weights[q] * geo.detJ);
      flush();
    }
  } else {
    static const double ref[3][2] = {{0, 0}, {1, 0}, {0, 1}};
    for (const auto& f : mesh->facets()) {
      if (g.marker >= 0 && f.marker != g.marker) continue;
      const int cell = f.cell;
      const auto geo = cell_geometry(*mesh, cell);
      ctx.h = geo.h;
      const int a = (f.local_edge + 1) % 3, b = (f.local_edge + 2) % 3;
      const auto& pa = mesh->vertices()[mesh->cells()[cell][a]];
      const auto& pb = mesh->vertices()[mesh->cells()[cell][b]];
      const double tx = pb[0] - pa[0], ty = pb[1] - pa[1];
      const double len = std::hypot(tx, ty);
      ctx.n = {ty / len, -tx / len};
      prepare_cell(cell);
      for (std::size_t q = 0; q < line_rule.points.size(); ++q) {
        const double t = line_rule.points[q];
        const double xi = ref[a][0] + t * (ref[b][0] - ref[a][0]);
        const double eta = ref[a][1] + t * (ref[b][1] - ref[a][1]);
        run_point(cell, geo, xi, eta, line_rule.weights[q] * len);
      }
      flush();
    }
  }
}

MeshPtr common_mesh(const SpacePtr& a, const SpacePtr& b) {
  if (a && b && a->mesh() != b->mesh()) throw AssemblyError("test and trial spaces live on different meshes");
  return a ? a->mesh() : b ? b->mesh() : nullptr;
}

void check_arguments(const Form& f, const SpacePtr& test, const SpacePtr& trial) {
  std::function<void(const Expr&)> rec = [&](const Expr& e) {
    if (e.op() == Op::Test && e.node().space != test)
      throw AssemblyError("form test function does not live on the given test space");
    if (e.op() == Op::Trial && e.node().space != trial)
      throw AssemblyError("form trial function does not live on the given trial space");
    if (e.has_test() || e.has_trial())
      for (const auto& c : e.children()) rec(c);
  };
  for (const auto& i : f.integrals) rec(i.integrand);
}

}  // namespace

SpacePtr argument_space(const Form& form, bool trial) {
  SpacePtr found;
  std::function<void(const Expr&)> rec = [&](const Expr& e) {
    if (e.op() == (trial ? Op::Trial : Op::Test)) {
      if (found && found != e.node().space) throw AssemblyError("form mixes arguments from different spaces");
      found = e.node().space;
    }
    if (trial ? e.has_trial() : e.has_test())
      for (const auto& c : e.children()) rec(c);
  };
  for (const auto& i : form.integrals) rec(i.integrand);
  return found;
}

int quadrature_degree(const Expr& integrand, const AssemblyOptions& opt) {
  if (opt.quadrature_degree >= 0) return opt.quadrature_degree;
  return default_quadrature_degree(integrand, opt.degree_cap);
}

CSRMatrix sparsity_pattern(const SpacePtr& test, const SpacePtr& trial) {
  const MeshPtr mesh = common_mesh(test, trial);
  std::vector<Triplet> t;
  for (int c = 0; c < mesh->num_cells(); ++c) {
    auto tb = local_basis(*test, c);
    auto rb = local_basis(*trial, c);
    for (const auto& i : tb)
      for (const auto& j : rb) t.push_back({i.dof, j.dof, 0.0});
  }
  if (test == trial)
    for (int i = 0; i < test->ndofs(); ++i) t.push_back({i, i, 0.0});
  return CSRMatrix::from_triplets(test->ndofs(), trial->ndofs(), std::move(t));
}

CSRMatrix assemble_matrix(const Form& a, const SpacePtr& test, const SpacePtr& trial, const AssemblyOptions& opt) {
  if (!test || !trial) throw AssemblyError("matrix assembly needs test and trial spaces");
  check_arguments(a, test, trial);
  const MeshPtr mesh = common_mesh(test, trial);
  CSRMatrix A = sparsity_pattern(test, trial);
  for (const auto& g : group_integrals(a, opt, 2))
    assemble_group(g, mesh, test, trial, [&](int i, int j, double v) {
      if (v != 0.0) *A.find(i, j) += v;
    });
  return A;
}

DenseVector assemble_vector(const Form& L, const SpacePtr& test, const AssemblyOptions& opt) {
  if (!test) throw AssemblyError("vector assembly needs a test space");
  check_arguments(L, test, nullptr);
  DenseVector b(test->ndofs(), 0.0);
  for (const auto& g : group_integrals(L, opt, 1))
    assemble_group(g, test->mesh(), test, nullptr, [&](int i, int, double v) { b[i] += v; });
  return b;
}

double assemble_scalar(const Form& M, const MeshPtr& mesh, const AssemblyOptions& opt) {
  double s = 0.0;
  for (const auto& g : group_integrals(M, opt, 0))
    assemble_group(g, mesh, nullptr, nullptr, [&](int, int, double v) { s += v; });
  return s;
}

}  // namespace ranslab
