#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ranslab/ns_solver.hpp"
#include "ranslab/walldist.hpp"

namespace ranslab {

/// Ordered groups of unknown names; each group is solved as one (possibly mixed) system.
struct SystemComposition {
  std::vector<std::vector<std::string>> groups;

  std::vector<std::string> names() const;
  /// Concatenated names of group i, e.g. "ke".
  std::string group_name(std::size_t i) const;
};

/// Spaces, arguments and iterates of a composed turbulence system, indexed by name.
struct TurbSystem {
  SystemComposition composition;
  std::map<std::string, SpacePtr> V;         // per unknown, per group, and "dq"
  std::map<std::string, Expr> q;             // trial functions per unknown
  std::map<std::string, Expr> v;             // test functions per unknown
  std::map<std::string, FieldFunction> q_;   // iterates per unknown and per group

  /// Bind k, v_k, k_ style names for every unknown.
  void bind(Namespace& ns) const;
};

TurbSystem compose_system(const SystemComposition& comp, const MeshPtr& mesh,
                          const std::map<std::string, int>& degrees = {});

struct ModelParams {
  std::string model;
  double Cmu = 0.09;
  double sigma_k = 1.0;
  double sigma_e = 1.3;
  double Ce1 = 1.44;
  double Ce2 = 1.92;
  double e_nut = 1.0;
  double f1 = 1.0;
  double e_d = 0.5;

  void bind(Namespace& ns) const;
};

std::vector<std::string> turbulence_model_names();
ModelParams model_parameters(const std::string& model);

/// Name, formula and boundary policy of one model quantity.
struct DerivedSpec {
  std::string name;
  std::string formula;
  DQBoundary boundary;
};

/// Evaluation-ordered derived quantities of a low-Reynolds model.
std::vector<DerivedSpec> model_derived_quantities(const std::string& model);

/// Coupled k-epsilon form (Fk + Fe) on a namespace with the model names bound.
Form steady_ke_1(const Namespace& ns);
/// k-equation with epsilon fully lagged.
Form steady_k_segregated(const Namespace& ns);
/// epsilon-equation alone.
Form steady_e_segregated(const Namespace& ns);
/// Blended epsilon sink of the k-equation.
Form ke_sink(const Namespace& ns);

/// y+ = u_tau y / nu, dof-wise.
FieldFunction compute_wall_scales(const FieldFunction& y, double u_tau, double nu);

struct TurbParams {
  std::string model = "LaunderSharma";
  double e_d = 0.5;
  bool coupled = true;
  SchemeParams prm;
  DQMode dq_mode = DQMode::Project;
  std::map<std::string, DQMode> dq_mode_overrides;  // per derived-quantity name
  double nut_omega = -1.0;  // relaxation of the projected nut_; negative: use prm.omega
  double clamp_floor = 1e-10;
  double u_tau = 0.05;
  double initial_k = 0.01;
  double initial_e = 0.01;
  int degree = 1;
  EikonalParams eikonal;
  std::vector<int> wall_markers{markers::wall};
};

/// Low-Reynolds k-epsilon solver bound to a Navier-Stokes solver.
class LowReynoldsSolver {
 public:
  LowReynoldsSolver(NSSolver& ns_solver, TurbParams prm);

  const TurbParams& params() const { return prm_; }
  const ModelParams& model() const { return mp_; }
  TurbSystem sys;
  Namespace ns;
  std::vector<DerivedQuantity> dqs;
  std::vector<std::unique_ptr<Scheme>> schemes;
  FieldFunction y;       // wall distance (Chien), clamped below by the first off-wall ordinate
  FieldFunction yplus;

  FieldFunction& k() { return sys.q_.at("k"); }
  FieldFunction& e() { return sys.q_.at("e"); }
  FieldFunction& nut() { return dq("nut_").field(); }
  DerivedQuantity& dq(const std::string& name);

  /// Rebuild derived quantities and schemes from the namespace.
  void define();
  void set_e_d(double e_d);
  /// Reset k and epsilon to the initial values (zero on walls).
  void initialize();
  void update_derived();
  /// One step of every turbulence scheme; returns the combined (residual, correction) norms.
  std::pair<double, double> step();

 private:
  void clamp(const std::string& name);

  NSSolver& ns_;
  TurbParams prm_;
  ModelParams mp_;
  std::map<std::string, std::vector<DirichletBC>> bcs_;
  std::map<std::string, PeriodicDofs> periodic_;
  std::map<std::string, std::vector<int>> fixed_;  // Dirichlet dofs per unknown, local numbering
};

struct CouplingRecord {
  int iter = 0;
  double ns_residual = 0.0;
  double ns_dx = 0.0;
  double turb_residual = 0.0;
  double turb_dx = 0.0;
  double error() const;
};

struct CouplingResult {
  std::vector<CouplingRecord> history;
  bool converged = false;
  int iterations = 0;
  bool finite = true;
};

/// Alternate NS step, NS derived quantities, turbulence step and turbulence derived quantities.
CouplingResult coupled_rans_iteration(NSSolver& ns, LowReynoldsSolver& turb, int max_iter, double max_err,
                                      const std::function<void(const CouplingRecord&)>& cb = {});

}  // namespace ranslab
