#pragma once

#include <string>
#include <vector>

#include "ranslab/assembly.hpp"
#include "ranslab/formula.hpp"

namespace ranslab {

enum class DQMode { Project, UseFormula, ComputeDofs };
/// Wall: derived field is forced to zero on the wall markers. None: no constraint.
enum class DQBoundary { Wall, None };

DQMode parse_dq_mode(const std::string& s);

/// Field defined by a formula over named solver quantities.
class DerivedQuantity {
 public:
  DerivedQuantity(std::string name, SpacePtr space, std::string formula, DQMode mode = DQMode::Project,
                  DQBoundary boundary = DQBoundary::Wall, std::vector<int> wall_markers = {markers::wall},
                  PeriodicDofs periodic = {}, double omega = 1.0);

  const std::string& name() const { return name_; }
  const std::string& formula() const { return formula_; }
  DQMode mode() const { return mode_; }
  DQBoundary boundary() const { return boundary_; }
  double omega() const { return omega_; }
  void set_omega(double w) { omega_ = w; }
  FieldFunction& field() { return field_; }
  const FieldFunction& field() const { return field_; }

  /// Parse the formula, validating the mode. Derivative-containing formulas are rejected in ComputeDofs mode.
  Expr expression(const Namespace& ns) const;
  /// The expression other forms should see under this name: the field coefficient, or the formula itself.
  Expr bind(const Namespace& ns) const;
  /// Recompute the field from the namespace. The first update is not relaxed.
  void update(const Namespace& ns);

 private:
  void project(const Expr& f);
  void compute_dofs(const Expr& f);

  std::string name_;
  SpacePtr space_;
  std::string formula_;
  DQMode mode_;
  DQBoundary boundary_;
  std::vector<int> wall_markers_;
  PeriodicDofs periodic_;
  double omega_;
  FieldFunction field_;
  std::vector<DirichletBC> bcs_;
  CSRMatrix M_;
  SparseLU lu_;
  bool initialized_ = false;
};

/// Evaluate a derivative-free expression at node `n` of a target space, reading coefficients dof-wise.
std::array<double, 4> evaluate_at_node(const Expr& e, const FunctionSpace& target, int node);

/// L2 projection of `f` onto `space` (mass-matrix solve, no constraints).
FieldFunction project(const Expr& f, const SpacePtr& space, const std::string& name = {});

/// Evaluate a derived-quantity list in order, rebinding each name in `ns` as it goes.
void update_all(std::vector<DerivedQuantity>& dqs, Namespace& ns);

}  // namespace ranslab
