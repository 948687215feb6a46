#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ranslab/derived.hpp"
#include "ranslab/scheme.hpp"

namespace ranslab {

enum class Convection { ImplicitLagged, Explicit, FullyImplicit };

struct VelocityBC {
  int marker;
  std::function<std::array<double, 2>(const Point&)> value;
};

struct NSParams {
  double nu = 1.0;
  std::array<double, 2> body_force{0.0, 0.0};
  int velocity_degree = 2;
  int pressure_degree = 1;
  bool stabilized = false;
  double tau = -1.0;   // constant PSPG parameter when positive
  double beta = 0.1;   // tau = beta h^2 / (4 nu) otherwise
  std::string scheme = "Steady_Coupled_1";
  SchemeParams prm;
  std::vector<int> noslip_markers{markers::wall};
  std::vector<int> symmetry_markers{markers::symmetry};
  std::vector<VelocityBC> velocity_bcs;
  bool periodic = true;
  bool pin_pressure = true;
};

/// Names of the registered coupled schemes.
std::vector<std::string> ns_scheme_names();
Convection scheme_convection(const std::string& name);

/// Coupled steady Navier-Stokes solver on a mixed velocity-pressure space.
class NSSolver {
 public:
  NSSolver(MeshPtr mesh, NSParams prm);

  const NSParams& params() const { return prm_; }
  const MeshPtr& mesh() const { return mesh_; }
  SpacePtr V, Q, VQ;
  FieldFunction up_, u_, p_;
  /// Shared names: u v p q (arguments), u_ p_ (iterates), nu, f, tau, h, n, Sij_, div_u_, d2udy2_.
  Namespace ns;
  PeriodicDofs periodic_V, periodic_Q, periodic_VQ;
  std::vector<DirichletBC> bcs;

  /// Replace the effective viscosity (e.g. nu + nut_) and rebuild the scheme.
  void set_viscosity(const Expr& nu_eff);
  Scheme& scheme() { return *scheme_; }
  /// Rebuild the scheme from the current namespace.
  void define();

  IterInfo solve(int max_iter, double max_err, const std::function<void(const IterInfo&)>& cb = {});
  /// Strain rate, divergence and vector Laplacian of u_.
  void update_derived();
  DerivedQuantity& Sij() { return dq_[0]; }
  DerivedQuantity& div_u() { return dq_[1]; }
  FieldFunction& g() { return g_; }

  /// Momentum residual F(up_) without constraints.
  DenseVector residual_vector();
  /// u_tau from the consistent wall reaction on `marker`.
  double wall_friction_velocity(int marker = markers::wall);
  /// u_tau from the laminar nu du_x/dn averaged over the wall facets.
  double wall_friction_velocity_gradient(int marker = markers::wall) const;

 private:
  void build_bcs();
  Form form(const Namespace& ns) const;

  MeshPtr mesh_;
  NSParams prm_;
  std::unique_ptr<Scheme> scheme_;
  std::vector<DerivedQuantity> dq_;
  FieldFunction g_;
  CSRMatrix Mg_;
  SparseLU lu_g_;
};

/// Constant tau, or beta h^2 / (4 nu) with the given laminar viscosity.
Expr pspg_tau(const NSParams& prm);

/// Navier-Stokes form on a namespace holding u v p q u_ nu f tau.
Form ns_form(const Namespace& ns, Convection conv, bool stabilized);

}  // namespace ranslab
