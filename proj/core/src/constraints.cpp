#include <algorithm>
#include <spdlog/spdlog.h>

#include "ranslab/assembly.hpp"
#include "ranslab/error.hpp"

namespace ranslab {

DirichletBC::DirichletBC(SpacePtr space, int block, int component, int marker, double value)
    : DirichletBC(std::move(space), block, component, marker, ValueFn([value](const Point&) { return value; })) {}

DirichletBC::DirichletBC(SpacePtr space, int block, int component, int marker, ValueFn value)
    : space_(std::move(space)), marker_(marker) {
  if (!space_) throw InvalidArgument("Dirichlet condition needs a space");
  if (block < 0 || block >= space_->num_blocks()) throw InvalidArgument("Dirichlet block out of range");
  collect(block, component, value);
}

void DirichletBC::collect(int block, int component, const ValueFn& value) {
  const auto& V = *space_->block(block);
  const int vs = V.element().value_size();
  for (int d : V.marked_dofs(marker_, component)) {
    dofs_.push_back(space_->offset(block) + d);
    values_.push_back(value(V.node_coordinates()[d / vs]));
  }
  if (dofs_.empty()) spdlog::warn("Dirichlet condition on marker {} matches no dofs", marker_);
}

DirichletBC DirichletBC::at_dofs(SpacePtr space, std::vector<int> dofs, std::vector<double> values) {
  if (dofs.size() != values.size()) throw InvalidArgument("at_dofs: dofs and values differ in length");
  DirichletBC bc;
  bc.space_ = std::move(space);
  for (int d : dofs)
    if (d < 0 || d >= bc.space_->ndofs()) throw InvalidArgument("at_dofs: dof out of range");
  bc.dofs_ = std::move(dofs);
  bc.values_ = std::move(values);
  return bc;
}

namespace {

std::vector<std::pair<int, double>> constrained(const std::vector<DirichletBC>& bcs, std::size_t n) {
  std::vector<double> val(n, 0.0);
  std::vector<char> on(n, 0);
  for (const auto& bc : bcs)
    for (std::size_t k = 0; k < bc.dofs().size(); ++k) {
      const int d = bc.dofs()[k];
      if (d < 0 || static_cast<std::size_t>(d) >= n) throw ConstraintError("Dirichlet dof outside the system");
      on[d] = 1;
      val[d] = bc.values()[k];
    }
  std::vector<std::pair<int, double>> out;
  for (std::size_t i = 0; i < n; ++i)
    if (on[i]) out.push_back({static_cast<int>(i), val[i]});
  return out;
}

void identity_rows(CSRMatrix& A, const std::vector<std::pair<int, double>>& rows) {
  const auto& rp = A.row_ptr();
  const auto& ci = A.col_index();
  auto& v = A.values();
  for (auto [i, g] : rows) {
    bool diag = false;
    for (int k = rp[i]; k < rp[i + 1]; ++k) {
      v[k] = ci[k] == i ? 1.0 : 0.0;
      diag = diag || ci[k] == i;
    }
    if (!diag) throw ConstraintError("constrained row " + std::to_string(i) + " has no diagonal entry");
  }
}

}  // namespace

void apply_dirichlet(CSRMatrix& A, DenseVector& b, const std::vector<DirichletBC>& bcs, bool symmetric) {
  if (A.rows() != static_cast<int>(b.size())) throw InvalidArgument("apply_dirichlet: size mismatch");
  auto rows = constrained(bcs, b.size());
  if (symmetric) {
    std::vector<char> on(b.size(), 0);
    std::vector<double> g(b.size(), 0.0);
    for (auto [i, val] : rows) {
      on[i] = 1;
      g[i] = val;
    }
    const auto& rp = A.row_ptr();
    const auto& ci = A.col_index();
    auto& v = A.values();
    for (int i = 0; i < A.rows(); ++i) {
      if (on[i]) continue;
      for (int k = rp[i]; k < rp[i + 1]; ++k)
        if (on[ci[k]]) {
          b[i] -= v[k] * g[ci[k]];
          v[k] = 0.0;
        }
    }
  }
  identity_rows(A, rows);
  for (auto [i, val] : rows) b[i] = val;
}

void apply_dirichlet(DenseVector& b, const std::vector<DirichletBC>& bcs) {
  for (auto [i, val] : constrained(bcs, b.size())) b[i] = val;
}

void apply_dirichlet(CSRMatrix& A, const std::vector<DirichletBC>& bcs) {
  identity_rows(A, constrained(bcs, static_cast<std::size_t>(A.rows())));
}

void apply_dirichlet_newton(CSRMatrix& A, DenseVector& b, std::span<const double> x,
                            const std::vector<DirichletBC>& bcs) {
  auto rows = constrained(bcs, b.size());
  identity_rows(A, rows);
  for (auto [i, val] : rows) b[i] = val - x[i];
}

void apply_dirichlet_newton(DenseVector& b, std::span<const double> x, const std::vector<DirichletBC>& bcs) {
  for (auto [i, val] : constrained(bcs, b.size())) b[i] = val - x[i];
}

PeriodicDofs periodic_dofs(const SpacePtr& space, const PeriodicMap& map) {
  PeriodicDofs out;
  const auto& mesh = *space->mesh();
  std::vector<int> partner(mesh.num_vertices(), -1);
  for (auto [m, s] : map.pairs) partner[m] = s;
  for (int b = 0; b < space->num_blocks(); ++b) {
    const auto& V = *space->block(b);
    const int vs = V.element().value_size();
    std::vector<std::pair<int, int>> nodes(map.pairs.begin(), map.pairs.end());
    if (V.element().degree == 2) {
      const auto& E = mesh.edges();
      for (int e = 0; e < mesh.num_edges(); ++e) {
        const int a = partner[E[e][0]], c = partner[E[e][1]];
        if (a < 0 || c < 0) continue;
        std::array<int, 2> key = a < c ? std::array<int, 2>{a, c} : std::array<int, 2>{c, a};
        auto it = std::lower_bound(E.begin(), E.end(), key);
        if (it != E.end() && *it == key)
          nodes.push_back({mesh.num_vertices() + e, mesh.num_vertices() + static_cast<int>(it - E.begin())});
      }
    }
    for (auto [m, s] : nodes)
      for (int k = 0; k < vs; ++k) out.pairs.push_back({space->offset(b) + V.dof(m, k), space->offset(b) + V.dof(s, k)});
  }
  return out;
}

namespace {

std::vector<int> owners(const PeriodicDofs& p, int n) {
  std::vector<int> owner(n, -1);
  std::vector<char> master(n, 0);
  for (auto [m, s] : p.pairs) {
    if (m < 0 || s < 0 || m >= n || s >= n) throw ConstraintError("periodic dof outside the system");
    if (owner[s] >= 0) throw ConstraintError("dof " + std::to_string(s) + " is a slave twice");
    owner[s] = m;
    master[m] = 1;
  }
  for (auto [m, s] : p.pairs) {
    if (owner[m] >= 0) throw ConstraintError("dof " + std::to_string(m) + " is both master and slave");
    (void)s;
  }
  return owner;
}

}  // namespace

void apply_periodic(CSRMatrix& A, DenseVector& b, const PeriodicDofs& p) {
  if (static_cast<int>(b.size()) != A.rows()) throw InvalidArgument("apply_periodic: size mismatch");
  apply_periodic(A, p);
  apply_periodic(b, p);
}

void apply_periodic(CSRMatrix& A, const PeriodicDofs& p) {
  const int n = A.rows();
  if (A.cols() != n) throw InvalidArgument("apply_periodic: matrix must be square");
  if (p.pairs.empty()) return;
  auto owner = owners(p, n);
  auto t = A.to_triplets();
  for (auto& e : t) {
    if (owner[e.row] >= 0) e.row = owner[e.row];
    if (owner[e.col] >= 0) e.col = owner[e.col];
  }
  for (int i = 0; i < n; ++i) t.push_back({i, i, 0.0});
  A = CSRMatrix::from_triplets(n, n, std::move(t));
  t = A.to_triplets();
  std::vector<double> diag(n, 0.0);
  for (const auto& e : t)
    if (e.row == e.col) diag[e.row] = e.value;
  for (auto [m, s] : p.pairs) {
    const double w = diag[m] != 0.0 ? diag[m] : 1.0;
    t.push_back({s, s, w});
    t.push_back({s, m, -w});
    t.push_back({m, s, -w});
    t.push_back({m, m, w});
  }
  A = CSRMatrix::from_triplets(n, n, std::move(t));
}

void apply_periodic(DenseVector& b, const PeriodicDofs& p) {
  for (auto [m, s] : p.pairs) {
    b[m] += b[s];
    b[s] = 0.0;
  }
}

void apply_periodic_newton(DenseVector& b, std::span<const double> x, const PeriodicDofs& p, const CSRMatrix& A) {
  for (auto [m, s] : p.pairs) {
    b[m] += b[s];
    b[s] = A.get(s, s) * (x[m] - x[s]);
  }
}

}  // namespace ranslab
