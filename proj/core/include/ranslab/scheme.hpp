#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ranslab/assembly.hpp"
#include "ranslab/formula.hpp"

namespace ranslab {

enum class IterationType { Picard, Newton };
enum class LinearSolverKind { Direct, Gmres };

IterationType parse_iteration_type(const std::string& s);
LinearSolverKind parse_linear_solver(const std::string& s);

struct SchemeParams {
  IterationType iteration_type = IterationType::Picard;
  double omega = 1.0;
  bool reassemble_lhs = true;
  bool reassemble_rhs = true;
  LinearSolverKind linear_solver = LinearSolverKind::Direct;
  double gmres_rtol = 1e-12;
  int gmres_maxit = 2000;
  int gmres_restart = 100;
  AssemblyOptions assembly;
  /// When non-empty, every freshly assembled constrained matrix is written here (Matrix Market).
  std::string matrix_market_path;
};

struct StepResult {
  double residual = 0.0;
  DenseVector dx;
};

/// One variational problem: forms, assembled system, solution view and settings.
class Scheme {
 public:
  Scheme(std::string name, Form a, Form L, FieldFunction x, std::vector<DirichletBC> bcs, PeriodicDofs periodic,
         SchemeParams prm);

  std::string name;
  Form a;
  Form L;
  CSRMatrix A;
  DenseVector b;
  FieldFunction x;  // aliases the owning solver's storage
  std::vector<DirichletBC> bcs;
  PeriodicDofs periodic;
  SchemeParams prm;
  std::function<void()> update_hook;

  const SpacePtr& space() const { return x.space(); }

  StepResult picard_step(bool assemble_A, bool assemble_b);
  StepResult newton_step();
  /// Dispatch on the iteration type, honoring the reassembly flags.
  StepResult step();

  int assemblies_A() const { return assemblies_A_; }

 private:
  DenseVector linear_solve(const DenseVector& rhs, const DenseVector& start);

  SparseLU lu_;
  bool have_A_ = false;
  bool have_b_ = false;
  bool lu_current_ = false;
  int assemblies_A_ = 0;
};

struct IterInfo {
  double residual = 0.0;
  double correction = 0.0;
  int iter = 0;
  bool converged = false;
  double error() const { return std::max(residual, correction); }
};

/// Iterate scheme.step() until max(residual, |dx|) <= max_err or max_iter steps.
IterInfo solve_nonlinear(Scheme& scheme, int max_iter, double max_err,
                         const std::function<void(const IterInfo&)>& update = {});

/// Raise every entry below `floor` to `floor`.
void positivity_clamp(std::span<double> x, double floor);

using FormMethod = std::function<Form(const Namespace&)>;

/// Build a scheme from a form method. Picard splits F into (a, L); Newton binds each
/// lagged name to its trial counterpart, acts on the unknown and differentiates.
Scheme make_scheme(std::string name, const Namespace& ns, const FormMethod& method, const FieldFunction& unknown,
                   const std::vector<std::pair<std::string, std::string>>& lagged_to_trial, SchemeParams prm,
                   std::vector<DirichletBC> bcs = {}, PeriodicDofs periodic = {});

}  // namespace ranslab
