#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ranslab/turbulence.hpp"

namespace ranslab {

/// Parameters of one channel run. Defaults reproduce the Re_tau = 395 setup.
struct RunConfig {
  std::string problem = "channel";
  int nx = 10;
  int ny = 50;
  double grading = 1.0;
  std::string model = "LaunderSharma";
  double e_d = 0.5;
  int velocity_degree = 1;
  int pressure_degree = 1;
  int turbulence_degree = 1;
  double omega_ns = 0.8;
  double omega_turb = 0.6;
  int max_iter = 50;
  double max_err = 1e-12;
  double tau = 0.01;
  double Re_tau = 395.0;
  double u_tau = 0.05;
  std::string linear_solver = "direct";
  std::string dq_mode = "project";
  double initial_k = 0.01;
  double initial_e = 0.01;
  int laminar_iter = 10;
  double laminar_err = 1e-6;
  int vtk_every = 0;  // also write fields_<iter>.vtk every n iterations; 0 disables
  std::string output_dir = "output";

  /// Half-channel height 1, so nu = u_tau / Re_tau and the driving gradient is u_tau^2.
  double nu() const { return u_tau / Re_tau; }
  /// Throws ConfigurationError on out-of-range values.
  void validate() const;
};

/// Strict JSON parsing: unknown keys and wrongly typed values are errors.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_json(const RunConfig& cfg);

struct RunResult {
  std::string model;
  double e_d = 0.0;
  CouplingResult coupling;
  double u_tau_reaction = 0.0;
  double u_tau_gradient = 0.0;
  double k_max = 0.0;
  double u_max = 0.0;
  double wall_clock = 0.0;
  std::string error;  // non-empty when the run threw
};

/// Solver state of a channel run, exposed for inspection after the iteration.
struct ChannelCase {
  MeshPtr mesh;
  std::unique_ptr<NSSolver> ns;
  std::unique_ptr<LowReynoldsSolver> turb;
};

ChannelCase make_channel_case(const RunConfig& cfg);

/// Laminar pre-solve, turbulence initialization and the coupled iteration.
/// With `write_outputs`, convergence.csv, fields_0.vtk, fields_final.vtk and summary.json
/// go to cfg.output_dir.
RunResult run_channel(const RunConfig& cfg, bool write_outputs = true, ChannelCase* keep = nullptr);

/// Every model for e_d in {0, 0.25, 0.5, 0.75, 1}; each run writes to its own subdirectory
/// and failures are recorded instead of aborting the sweep.
std::vector<RunResult> run_sweep(const RunConfig& base, bool write_outputs = true,
                                 const std::function<void(const RunResult&)>& cb = {});

struct ValidationCase {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// P1 Poisson L2 errors for u = sin(pi x) sin(pi y) on the unit square with n x n cells.
double poisson_l2_error(int n);
/// Max-norm velocity error and L2 divergence of Taylor-Hood Poiseuille flow.
std::pair<double, double> stokes_poiseuille_error(int nx, int ny);
/// Manufactured-solution suite used by `rans-lab validate`.
std::vector<ValidationCase> run_validation();

}  // namespace ranslab
