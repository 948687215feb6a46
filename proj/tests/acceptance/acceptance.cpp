// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "ranslab/ranslab.hpp"

using namespace ranslab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds; <= 0 means no limit
  std::function<Outcome()> run;
};

template <class... A>
std::string format(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

MeshPtr channel(int nx, int ny) { return std::make_shared<const Mesh>(generate_channel_mesh(nx, ny, 1.0, 1.0)); }

// Channel runs shared by several criteria, keyed by model, e_d and max_err.
struct Run {
  RunResult result;
  int iterations_to(double tol) const {
    for (const auto& r : result.coupling.history)
      if (r.error() <= tol) return r.iter;
    return -1;
  }
  double final_error() const {
    const auto& h = result.coupling.history;
    return h.empty() ? INFINITY : h.back().error();
  }
  // A relaminarized state (k collapsed to the clamp floor) is not a RANS solution.
  bool turbulent() const { return result.k_max > 1e-6; }
};

std::map<std::string, Run> cache;

const Run& channel_run(const std::string& model, double e_d, double max_err = 1e-12, int max_iter = 50) {
  const std::string key = format("%s/%g/%g/%d", model.c_str(), e_d, max_err, max_iter);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  RunConfig cfg;
  cfg.model = model;
  cfg.e_d = e_d;
  cfg.max_err = max_err;
  cfg.max_iter = max_iter;
  Run r;
  try {
    r.result = run_channel(cfg, false);
  } catch (const std::exception& e) {
    r.result.model = model;
    r.result.error = e.what();
    r.result.coupling.finite = false;
  }
  return cache.emplace(key, std::move(r)).first->second;
}

std::string describe(const Run& r) {
  if (!r.result.error.empty()) return r.result.model + " threw: " + r.result.error;
  return format("%s e_d=%g: converged=%s it=%d final_err=%.2e k_max=%.2e", r.result.model.c_str(), r.result.e_d,
             r.result.coupling.converged ? "yes" : "no", r.result.coupling.iterations, r.final_error(),
             r.result.k_max);
}

Outcome poisson() {
  std::vector<double> err;
  for (int n : {8, 16, 32, 64}) err.push_back(poisson_l2_error(n));
  bool ok = true;
  std::string d = "slopes";
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double s = std::log2(err[i - 1] / err[i]);
    ok = ok && s >= 1.9 && s <= 2.1;
    d += format(" %.3f", s);
  }
  return {ok, d};
}

Outcome stokes() {
  auto [e, div] = stokes_poiseuille_error(10, 50);
  return {e <= 1e-9 && div <= 1e-9, format("max velocity error %.2e, div L2 %.2e", e, div)};
}

Outcome jacobians() {
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.01, 1.0);
  double worst_ns = 0.0, worst_ke = 0.0, worst_eik = 0.0;

  for (int degree : {2, 1}) {
    NSParams prm;
    prm.nu = 0.01;
    prm.velocity_degree = degree;
    prm.stabilized = degree == 1;
    prm.prm.iteration_type = IterationType::Newton;
    NSSolver s(channel(3, 8), prm);
    for (int t = 0; t < 5; ++t) {
      for (auto& x : s.up_.values()) x = U(rng);
      std::vector<double> d(s.up_.size());
      for (auto& x : d) x = U(rng);
      worst_ns = std::max(worst_ns, oracle::jacobian_fd_error(s.scheme().a, -s.scheme().L, s.up_, d));
    }
  }

  for (const auto& model : turbulence_model_names()) {
    RunConfig cfg;
    cfg.nx = 3;
    cfg.ny = 16;
    cfg.model = model;
    auto cc = make_channel_case(cfg);
    TurbParams tp;
    tp.model = model;
    tp.prm.iteration_type = IterationType::Newton;
    LowReynoldsSolver turb(*cc.ns, tp);
    auto& sch = *turb.schemes.at(0);
    for (int t = 0; t < 5; ++t) {
      for (auto& x : sch.x.values()) x = P(rng);
      turb.update_derived();
      std::vector<double> d(sch.x.size());
      for (auto& x : d) x = U(rng);
      worst_ke = std::max(worst_ke, oracle::jacobian_fd_error(sch.a, -sch.L, sch.x, d));
    }
  }

  auto V = make_space(channel(3, 8), {1, ValueShape::Scalar});
  FieldFunction y(V, "y");
  for (int t = 0; t < 5; ++t) {
    const double a = 1.0 + 0.5 * P(rng), b = 0.3 * U(rng);
    y.interpolate([&](const Point& x) { return std::array<double, 3>{a * x[1] + b * x[0] * x[1], 0, 0}; });
    std::vector<double> d(V->ndofs());
    for (auto& x : d) x = U(rng);
    worst_eik = std::max(worst_eik, oracle::jacobian_fd_error(eikonal_form(coefficient(y), test_function(V), 0.01), y, d));
  }
  const double worst = std::max({worst_ns, worst_ke, worst_eik});
  return {worst <= 1e-5, format("max relative error NS %.1e, k-e %.1e, Eikonal %.1e", worst_ns, worst_ke, worst_eik)};
}

Outcome affinity() {
  RunConfig cfg;
  auto cc = make_channel_case(cfg);
  auto& turb = *cc.turb;
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> P(0.01, 1.0);
  for (auto& x : turb.sys.q_.at("ke").values()) x = P(rng);
  const auto& V = turb.sys.V.at("ke");
  auto at = [&](double e_d) {
    turb.ns["e_d"] = constant(e_d);
    auto [a, L] = lhs_rhs(ke_sink(turb.ns));
    return std::pair{assemble_matrix(a, V, V), assemble_vector(L, V)};
  };
  auto [A0, b0] = at(0.0);
  auto [A1, b1] = at(1.0);
  double worst = 0.0;
  for (double e_d : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    auto [A, b] = at(e_d);
    // Same sparsity pattern for every e_d, so entrywise comparison runs over the CSR values.
    for (std::size_t i = 0; i < A.values().size(); ++i)
      worst = std::max(worst, std::abs(A.values()[i] - ((1 - e_d) * A0.values()[i] + e_d * A1.values()[i])));
    for (std::size_t i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(b[i] - ((1 - e_d) * b0[i] + e_d * b1[i])));
  }
  return {worst <= 1e-13, format("max entrywise deviation %.1e", worst)};
}

Outcome convergence_half() {
  bool ok = true;
  std::string d;
  for (const auto& m : turbulence_model_names()) {
    const Run& r = channel_run(m, 0.5);
    ok = ok && r.result.coupling.converged;
    d += (d.empty() ? "" : "; ") + describe(r);
  }
  return {ok, d};
}

Outcome chien_unstable() {
  const Run& chien = channel_run("Chien", 1.0);
  bool ok = !chien.result.coupling.converged;
  std::string d = describe(chien);
  for (const char* m : {"LaunderSharma", "JonesLaunder"}) {
    const Run& r = channel_run(m, 1.0);
    ok = ok && r.result.coupling.converged && r.turbulent();
    d += "; " + describe(r) + (r.turbulent() ? "" : " (relaminarized)");
  }
  return {ok, d};
}

Outcome ordering() {
  const Run& r0 = channel_run("LaunderSharma", 0.0, 1e-8, 200);
  const Run& r1 = channel_run("LaunderSharma", 1.0, 1e-8, 200);
  const int n0 = r0.iterations_to(1e-8), n1 = r1.iterations_to(1e-8);
  const bool ok = n0 > 0 && n1 > 0 && r0.turbulent() && r1.turbulent() && n0 > n1;
  return {ok, format("iterations to 1e-8: e_d=0 -> %d (k_max %.1e), e_d=1 -> %d (k_max %.1e)%s", n0, r0.result.k_max, n1,
                  r1.result.k_max, r1.turbulent() ? "" : "; e_d=1 relaminarized")};
}

Outcome momentum_balance() {
  bool ok = true;
  std::string d;
  for (const auto& m : turbulence_model_names()) {
    const Run& r = channel_run(m, 0.5);
    const double rel = std::abs(r.result.u_tau_reaction - 0.05) / 0.05;
    // The e_d = 0.5 runs stall around 1e-7; count a state as converged below 1e-6.
    const bool converged = r.final_error() <= 1e-6 && r.turbulent();
    ok = ok && converged && rel <= 0.02;
    d += format("%s%s u_tau=%.5f (%.2f%%; wall-gradient estimate %.4f; final_err %.1e)", d.empty() ? "" : "; ",
                m.c_str(), r.result.u_tau_reaction, 100 * rel, r.result.u_tau_gradient, r.final_error());
  }
  return {ok, d};
}

Outcome eikonal() {
  auto wd = solve_eikonal(channel(10, 50));
  const auto& X = wd.y.space()->block(0)->node_coordinates();
  double err = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) err = std::max(err, std::abs(wd.y[i] - oracle::eikonal_1d(X[i][1], 1.0, 0.01)));
  double gmin = INFINITY, gmax = 0.0;
  for (auto [yc, g] : oracle::p1_cell_gradients(wd.y)) {
    if (yc < 3.0 / 50 || yc > 1.0 - 3.0 / 50) continue;
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  const bool ok = wd.converged && err <= 0.05 && gmin >= 0.8 && gmax <= 1.05;
  return {ok, format("max error %.2e, |grad y| in [%.3f, %.3f] away from the boundaries", err, gmin, gmax)};
}

Outcome streamfunction_poiseuille() {
  NSParams prm;
  prm.nu = 0.5;
  prm.body_force = {1.0, 0.0};
  auto mesh = channel(10, 50);
  NSSolver s(mesh, prm);
  s.solve(5, 1e-12);
  auto psi = streamfunction(s.u_);
  const Expr y = component(spatial_coordinate(), 1);
  const Expr e = coefficient(psi) - (y * y - y * y * y / constant(3.0));
  const double err = std::sqrt(assemble_scalar(e * e * dx, mesh));
  return {err <= 1e-6, format("L2 error %.2e", err)};
}

Outcome property_suites() {
  const std::string cmd = std::string(RANSLAB_UNIT_TESTS) +
                          " --test-suite=forms,fem_spaces,linalg,schemes,assembly,mesh --no-version=true > "
                          "acceptance_properties.log 2>&1";
  const int rc = std::system(cmd.c_str());
  return {rc == 0, rc == 0 ? "forms, fem_spaces, linalg, schemes, assembly and mesh suites pass"
                           : "unit suites failed, see acceptance_properties.log"};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<Criterion> criteria{
      {1, "Poisson P1 convergence", 10, poisson},
      {2, "Stokes Taylor-Hood Poiseuille", 10, stokes},
      {3, "Jacobian consistency", 30, jacobians},
      {4, "e_d blend affinity", 5, affinity},
      {5, "channel convergence at e_d=0.5", 300, convergence_half},
      {6, "Chien unstable at e_d=1", 0, chien_unstable},
      {7, "implicit sink converges faster", 0, ordering},
      {8, "momentum balance", 0, momentum_balance},
      {9, "Eikonal wall distance", 0, eikonal},
      {10, "streamfunction", 0, streamfunction_poiseuille},
      {11, "property suites", 120, property_suites},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && t > c.time_limit) {
      o.pass = false;
      o.detail += format(" [over the %g s limit]", c.time_limit);
    }
    failed += !o.pass;
    std::printf("%s %2d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), t, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
