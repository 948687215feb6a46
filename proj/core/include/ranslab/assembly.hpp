#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ranslab/form.hpp"
#include "ranslab/linalg.hpp"
#include "ranslab/mesh.hpp"

namespace ranslab {

struct AssemblyOptions {
  int quadrature_degree = -1;  // -1: automatic
  int degree_cap = 6;
};

/// Space carried by the test (or trial) arguments of a form; null when absent.
SpacePtr argument_space(const Form& form, bool trial);

/// Quadrature degree chosen for one integrand.
int quadrature_degree(const Expr& integrand, const AssemblyOptions& opt = {});

/// Full coupling pattern of two spaces, including the diagonal for square systems.
CSRMatrix sparsity_pattern(const SpacePtr& test, const SpacePtr& trial);

CSRMatrix assemble_matrix(const Form& a, const SpacePtr& test, const SpacePtr& trial,
                          const AssemblyOptions& opt = {});
DenseVector assemble_vector(const Form& L, const SpacePtr& test, const AssemblyOptions& opt = {});
double assemble_scalar(const Form& M, const MeshPtr& mesh, const AssemblyOptions& opt = {});

/// Strong condition on the dofs of one block (and optionally one component) on a marker.
class DirichletBC {
 public:
  using ValueFn = std::function<double(const Point&)>;

  DirichletBC(SpacePtr space, int block, int component, int marker, double value);
  DirichletBC(SpacePtr space, int block, int component, int marker, ValueFn value);
  /// Constrain explicit global dofs of `space` to the given values.
  static DirichletBC at_dofs(SpacePtr space, std::vector<int> dofs, std::vector<double> values);

  const SpacePtr& space() const { return space_; }
  int marker() const { return marker_; }
  /// Global dofs (in the full space numbering) and their prescribed values.
  const std::vector<int>& dofs() const { return dofs_; }
  const std::vector<double>& values() const { return values_; }

 private:
  DirichletBC() = default;
  void collect(int block, int component, const ValueFn& value);

  SpacePtr space_;
  int marker_ = -1;
  std::vector<int> dofs_;
  std::vector<double> values_;
};

/// Row-only application: constrained rows become identity rows with b = g.
/// With `symmetric`, constrained columns are eliminated as well.
void apply_dirichlet(CSRMatrix& A, DenseVector& b, const std::vector<DirichletBC>& bcs, bool symmetric = false);
void apply_dirichlet(DenseVector& b, const std::vector<DirichletBC>& bcs);
/// Matrix part of the row-only application.
void apply_dirichlet(CSRMatrix& A, const std::vector<DirichletBC>& bcs);
/// Correction form: rhs = g - x on constrained rows.
void apply_dirichlet_newton(CSRMatrix& A, DenseVector& b, std::span<const double> x,
                            const std::vector<DirichletBC>& bcs);
void apply_dirichlet_newton(DenseVector& b, std::span<const double> x, const std::vector<DirichletBC>& bcs);

/// Master/slave dof pairs of a space under a periodic vertex map.
struct PeriodicDofs {
  std::vector<std::pair<int, int>> pairs;
};

PeriodicDofs periodic_dofs(const SpacePtr& space, const PeriodicMap& map);

/// Fold slave rows and columns into their masters and add w (x_s - x_m) = 0, with w the
/// folded master diagonal, to the slave row and its transpose to the master row.
void apply_periodic(CSRMatrix& A, DenseVector& b, const PeriodicDofs& p);
void apply_periodic(CSRMatrix& A, const PeriodicDofs& p);
void apply_periodic(DenseVector& b, const PeriodicDofs& p);
/// Newton variant: the slave row of the rhs becomes w (x_m - x_s), with w read from the folded `A`.
void apply_periodic_newton(DenseVector& b, std::span<const double> x, const PeriodicDofs& p, const CSRMatrix& A);

}  // namespace ranslab
